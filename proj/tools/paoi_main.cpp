// Batch front end: evaluates analytic PAoI curves, runs tandem simulations,
// compares the two, sweeps percentiles over parameters, and regenerates the
// named result figures as CSV/JSON data files.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "paoi/core.hpp"
#include "paoi/md1_tandem.hpp"
#include "paoi/mm1_tandem.hpp"
#include "paoi/numerics.hpp"
#include "paoi/sim.hpp"

using json = nlohmann::json;
using namespace paoi;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitConfigError = 2;

struct CliConfig {
    std::string mode = "analytic";
    std::string tandem = "md1";
    double lambda = 0.5;
    double mu1 = 1.0;
    double mu2 = 1.25;
    double service_d = 0.8;
    std::uint64_t packets = 10'000'000;
    std::uint64_t warmup = 1000;
    std::uint64_t seed = 1;
    double tau_min = 0.0;
    double tau_max = 30.0;
    std::size_t tau_points = 601;
    std::string sweep_param = "lambda";
    std::vector<double> sweep_values;
    std::vector<double> percentiles = {0.95, 0.99, 0.999};
    std::string out;
    std::string format = "csv";
    std::string figure;
    std::string dump_records;
    double sim_lambda = 0.0; // compare mode: override the simulated rate (sensitivity check)
};

TandemParams params_from(const CliConfig& cfg) {
    if (cfg.tandem == "md1") {
        return TandemParams::md1(cfg.lambda, cfg.mu1, cfg.service_d);
    }
    return TandemParams::mm1(cfg.lambda, cfg.mu1, cfg.mu2);
}

json config_json(const CliConfig& cfg) {
    json j;
    j["mode"] = cfg.mode;
    j["tandem"] = cfg.tandem;
    j["lambda"] = cfg.lambda;
    j["mu1"] = cfg.mu1;
    if (cfg.tandem == "md1") {
        j["service_d"] = cfg.service_d;
    } else {
        j["mu2"] = cfg.mu2;
    }
    j["packets"] = cfg.packets;
    j["warmup"] = cfg.warmup;
    j["seed"] = cfg.seed;
    j["tau_min"] = cfg.tau_min;
    j["tau_max"] = cfg.tau_max;
    j["tau_points"] = cfg.tau_points;
    if (cfg.mode == "sweep") {
        j["sweep_param"] = cfg.sweep_param;
        j["sweep_values"] = cfg.sweep_values;
        j["percentiles"] = cfg.percentiles;
    }
    if (cfg.mode == "reproduce") {
        j["figure"] = cfg.figure;
    }
    j["format"] = cfg.format;
    return j;
}

std::string fmt_num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct Table {
    json meta = json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

void write_table(const Table& table, const std::string& path, const std::string& format) {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot open output file: " + path);
    }
    if (format == "json") {
        json j;
        j["meta"] = table.meta;
        j["columns"] = table.columns;
        j["rows"] = json::array();
        for (const auto& row : table.rows) {
            j["rows"].push_back(row);
        }
        os << j.dump(2) << "\n";
        return;
    }
    for (auto it = table.meta.begin(); it != table.meta.end(); ++it) {
        os << "# " << it.key() << ": " << it.value().dump() << "\n";
    }
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        os << (i ? "," : "") << table.columns[i];
    }
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << fmt_num(row[i]);
        }
        os << "\n";
    }
}

std::string resolve_out(const CliConfig& cfg, const std::string& default_stem) {
    if (!cfg.out.empty()) return cfg.out;
    std::string dir = ".";
    if (const char* env = std::getenv("PAOI_OUT_DIR"); env && *env) {
        dir = env;
    }
    return (std::filesystem::path(dir) / (default_stem + "." + cfg.format)).string();
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return out;
}

/// Uniform handle over the two tandem evaluators: one shared underlying
/// instance serving the mixture and all four case densities.
struct Analytic {
    CaseProbabilities probs;
    double support_lower = 0.0;
    QuadratureSpec spec;
    std::function<double(double)> mixture_pdf;
    std::array<std::function<double(double)>, 4> case_pdf;

    MixedDistribution mixture_dist() const { return {mixture_pdf, {}, support_lower}; }
    MixedDistribution case_dist(CaseLabel label) const {
        return {case_pdf[static_cast<std::size_t>(label)], {}, support_lower};
    }
};

Analytic make_analytic(const TandemParams& params, double abs_tol = 1e-9) {
    Analytic a;
    if (params.second_is_deterministic()) {
        auto eval = std::make_shared<Md1TandemPaoi>(params);
        a.probs = eval->case_probabilities();
        a.support_lower = eval->support_lower();
        a.spec = md1_paoi_quadrature_spec(params, abs_tol);
        a.mixture_pdf = [eval](double t) { return eval->mixture_pdf(t); };
        for (auto label : kAllCases) {
            a.case_pdf[static_cast<std::size_t>(label)] = [eval, label](double t) {
                return eval->case_pdf(label, t);
            };
        }
    } else {
        auto eval = std::make_shared<Mm1TandemPaoi>(params);
        a.probs = eval->case_probabilities();
        a.support_lower = 0.0;
        a.spec = mm1_paoi_quadrature_spec(params, abs_tol);
        a.mixture_pdf = [eval](double t) { return eval->mixture_pdf(t); };
        for (auto label : kAllCases) {
            a.case_pdf[static_cast<std::size_t>(label)] = [eval, label](double t) {
                return eval->case_pdf(label, t);
            };
        }
    }
    return a;
}

void add_case_probabilities(Table& table, const CaseProbabilities& probs) {
    table.meta["case_probabilities"] =
        json{{"A", probs.a}, {"B", probs.b}, {"C", probs.c}, {"D", probs.d}};
}

/// Index-ordered parallel map for sweep points and figure parts.
template <class F>
void parallel_for(std::size_t n, F&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    fn(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

// ---------------------------------------------------------------- analytic --

Table analytic_curve_table(const TandemParams& params, const std::vector<double>& grid) {
    auto analytic = make_analytic(params);
    Table table;
    add_case_probabilities(table, analytic.probs);
    table.meta["support_lower"] = analytic.support_lower;
    table.columns = {"tau",   "pdf_total", "cdf_total", "pdf_A", "pdf_B", "pdf_C",
                     "pdf_D", "cdf_A",     "cdf_B",     "cdf_C", "cdf_D"};

    const auto mixture = analytic.mixture_dist();
    CdfEvaluator mix_eval(mixture, analytic.spec);
    const auto cdf_total = mix_eval.cdf_many(grid);

    std::array<std::vector<double>, 4> cdf_case;
    for (auto label : kAllCases) {
        const auto k = static_cast<std::size_t>(label);
        const auto dist = analytic.case_dist(label);
        CdfEvaluator eval(dist, analytic.spec);
        cdf_case[k] = eval.cdf_many(grid);
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double tau = grid[i];
        std::vector<double> row{tau, analytic.mixture_pdf(tau), cdf_total[i]};
        for (auto label : kAllCases) {
            row.push_back(analytic.case_pdf[static_cast<std::size_t>(label)](tau));
        }
        for (auto label : kAllCases) {
            row.push_back(cdf_case[static_cast<std::size_t>(label)][i]);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

int run_analytic(const CliConfig& cfg) {
    auto params = params_from(cfg);
    params.require_stable();
    auto grid = linspace(cfg.tau_min, cfg.tau_max, cfg.tau_points);
    Table table = analytic_curve_table(params, grid);
    table.meta["config"] = config_json(cfg);
    write_table(table, resolve_out(cfg, "analytic_" + cfg.tandem), cfg.format);
    return kExitOk;
}

// ---------------------------------------------------------------- simulate --

int run_simulate(const CliConfig& cfg) {
    auto params = params_from(cfg);
    SimConfig sim_cfg{params, cfg.packets, cfg.warmup, cfg.seed};

    TandemSimulator sim(sim_cfg);
    std::vector<double> total;
    std::array<std::vector<double>, 4> by_case;
    std::size_t n_records = 0;
    std::optional<std::ofstream> dump_os;
    if (!cfg.dump_records.empty()) {
        dump_os.emplace(cfg.dump_records);
        if (!*dump_os) {
            throw std::runtime_error("cannot open record dump file: " + cfg.dump_records);
        }
        *dump_os << kRecordCsvHeader << "\n";
    }
    PacketRecord rec;
    while (sim.next(rec)) {
        ++n_records;
        if (dump_os) {
            write_record_csv_row(*dump_os, rec);
        }
        if (rec.has_paoi) {
            total.push_back(rec.delta);
            by_case[static_cast<std::size_t>(rec.case_label)].push_back(rec.delta);
        }
    }

    Table table;
    table.meta["config"] = config_json(cfg);
    table.meta["unstable"] = !params.stable();
    table.columns = {"tau", "ecdf_total", "ecdf_A", "ecdf_B", "ecdf_C", "ecdf_D"};
    if (total.empty()) {
        table.meta["notice"] = "no PAoI samples: the very first packet has no predecessor";
    } else {
        EmpiricalSets sets{EmpiricalDistribution(std::move(total)), {}, {}, n_records};
        for (std::size_t k = 0; k < 4; ++k) {
            sets.counts[k] = by_case[k].size();
            if (!by_case[k].empty()) sets.by_case[k].emplace(std::move(by_case[k]));
        }
        table.meta["case_counts"] = json{{"A", sets.counts[0]},
                                         {"B", sets.counts[1]},
                                         {"C", sets.counts[2]},
                                         {"D", sets.counts[3]}};
        table.meta["paoi_samples"] = sets.total.n();
        table.meta["mean_paoi"] = sets.total.mean();
        for (double tau : linspace(cfg.tau_min, cfg.tau_max, cfg.tau_points)) {
            std::vector<double> row{tau, sets.total.ecdf(tau)};
            for (auto& oc : sets.by_case) {
                row.push_back(oc ? oc->ecdf(tau) : std::numeric_limits<double>::quiet_NaN());
            }
            table.rows.push_back(std::move(row));
        }
    }
    write_table(table, resolve_out(cfg, "simulate_" + cfg.tandem), cfg.format);
    return kExitOk;
}

// ----------------------------------------------------------------- compare --

double dkw_bound(std::size_t n) {
    // two-sided DKW epsilon at confidence 1 - 1e-4
    return std::sqrt(std::log(2.0 / 1e-4) / (2.0 * static_cast<double>(n)));
}

int run_compare(const CliConfig& cfg) {
    auto params = params_from(cfg);
    params.require_stable();
    auto analytic = make_analytic(params);
    CliConfig sim_side = cfg;
    if (cfg.sim_lambda > 0.0) {
        sim_side.lambda = cfg.sim_lambda;
    }
    SimConfig sim_cfg{params_from(sim_side), cfg.packets, cfg.warmup, cfg.seed};
    auto sets = simulate_empirical(sim_cfg);

    Table table;
    table.meta["config"] = config_json(cfg);
    if (cfg.sim_lambda > 0.0) {
        table.meta["sim_lambda_override"] = cfg.sim_lambda;
    }
    add_case_probabilities(table, analytic.probs);
    table.columns = {"metric_index", "value", "threshold", "pass"};
    std::vector<std::string> metric_names;
    bool all_pass = true;
    auto push_metric = [&](const std::string& name, double value, double threshold) {
        const bool pass = value <= threshold;
        all_pass = all_pass && pass;
        metric_names.push_back(name);
        table.rows.push_back({static_cast<double>(metric_names.size() - 1), value, threshold,
                              pass ? 1.0 : 0.0});
    };

    const auto mixture = analytic.mixture_dist();
    CdfEvaluator mix_eval(mixture, analytic.spec);
    const auto cdf_at = mix_eval.cdf_many(sets.total.samples());
    push_metric("ks_total", ks_distance_from_values(cdf_at, sets.total),
                std::max(0.005, 2.0 * dkw_bound(sets.total.n())));

    const auto probs = analytic.probs.as_array();
    for (auto label : kAllCases) {
        const auto k = static_cast<std::size_t>(label);
        const std::string suffix(1, to_char(label));
        if (!sets.by_case[k]) {
            push_metric("ks_case_" + suffix, std::numeric_limits<double>::infinity(), 1.0);
            continue;
        }
        const auto dist = analytic.case_dist(label);
        CdfEvaluator eval(dist, analytic.spec);
        const auto vals = eval.cdf_many(sets.by_case[k]->samples());
        push_metric("ks_case_" + suffix, ks_distance_from_values(vals, *sets.by_case[k]),
                    std::max(0.01, 2.0 * dkw_bound(sets.by_case[k]->n())));
    }
    for (auto label : kAllCases) {
        const auto k = static_cast<std::size_t>(label);
        const double z = binomial_z(sets.counts[k], sets.total.n(), probs[k]);
        push_metric(std::string("case_freq_abs_z_") + to_char(label), std::abs(z), 4.0);
    }
    const double mean_analytic = mix_eval.mean();
    const double mean_sim = sets.total.mean();
    push_metric("mean_rel_err", std::abs(mean_analytic - mean_sim) / mean_analytic, 0.01);
    table.meta["metric_names"] = metric_names;
    table.meta["mean_analytic"] = mean_analytic;
    table.meta["mean_simulated"] = mean_sim;
    table.meta["pass"] = all_pass;

    write_table(table, resolve_out(cfg, "compare_" + cfg.tandem), cfg.format);
    return all_pass ? kExitOk : kExitValidationFailure;
}

// ------------------------------------------------------------------- sweep --

struct SweepRow {
    double value = 0.0;
    bool stable = false;
    std::vector<double> quantiles;
    double mean = std::numeric_limits<double>::quiet_NaN();
};

TandemParams sweep_params(const CliConfig& cfg, const std::string& param, double value) {
    double lambda = cfg.lambda, mu1 = cfg.mu1, mu2 = cfg.mu2, d = cfg.service_d;
    if (param == "lambda") {
        lambda = value;
    } else if (param == "mu1") {
        mu1 = value;
    } else if (param == "mu2") {
        mu2 = value;
    } else if (param == "service-d") {
        d = value;
    } else {
        throw CLI::ValidationError("--sweep-param", "unknown sweep parameter '" + param + "'");
    }
    return cfg.tandem == "md1" ? TandemParams::md1(lambda, mu1, d)
                               : TandemParams::mm1(lambda, mu1, mu2);
}

SweepRow sweep_point(const TandemParams& params, const std::vector<double>& percentiles) {
    SweepRow row;
    row.stable = params.stable();
    if (!row.stable) {
        row.quantiles.assign(percentiles.size(), std::numeric_limits<double>::quiet_NaN());
        return row;
    }
    auto analytic = make_analytic(params);
    const auto mixture = analytic.mixture_dist();
    const double p_max = *std::max_element(percentiles.begin(), percentiles.end());
    // Horizon sized for the deepest percentile; if the tail constant eats the
    // allowance, lengthen and retry.
    double residual = (1.0 - p_max) * std::exp(-2.0);
    for (int attempt = 0;; ++attempt) {
        QuadratureSpec spec = analytic.spec;
        spec.tail_residual = residual;
        try {
            CdfEvaluator eval(mixture, spec);
            row.quantiles.clear();
            for (double p : percentiles) {
                row.quantiles.push_back(eval.quantile(p));
            }
            // first-order exponential-tail correction for the truncated mass
            const double missing = std::max(0.0, 1.0 - eval.total_mass());
            row.mean = eval.mean() + missing * (eval.upper_bound() + 1.0 / spec.tail_rate);
            return row;
        } catch (const BracketError&) {
            if (attempt >= 5) throw;
            residual *= 0.1;
        }
    }
}

int run_sweep(const CliConfig& cfg) {
    std::vector<double> values = cfg.sweep_values;
    if (values.empty()) {
        for (int i = 1; i <= 19; ++i) values.push_back(0.05 * i);
    }
    std::vector<SweepRow> rows(values.size());
    parallel_for(values.size(), [&](std::size_t i) {
        rows[i] = sweep_point(sweep_params(cfg, cfg.sweep_param, values[i]), cfg.percentiles);
        rows[i].value = values[i];
    });

    Table table;
    table.meta["config"] = config_json(cfg);
    table.columns = {cfg.sweep_param, "stable"};
    for (double p : cfg.percentiles) {
        table.columns.push_back("p" + fmt_num(100.0 * p));
    }
    table.columns.push_back("mean");
    for (const auto& row : rows) {
        std::vector<double> r{row.value, row.stable ? 1.0 : 0.0};
        r.insert(r.end(), row.quantiles.begin(), row.quantiles.end());
        r.push_back(row.mean);
        table.rows.push_back(std::move(r));
    }
    write_table(table, resolve_out(cfg, "sweep_" + cfg.tandem + "_" + cfg.sweep_param),
                cfg.format);
    return kExitOk;
}

// --------------------------------------------------------------- reproduce --

std::string part_path(const CliConfig& cfg, const std::string& part) {
    const std::string stem = cfg.figure + "_" + part;
    if (!cfg.out.empty()) {
        return (std::filesystem::path(cfg.out) / (stem + "." + cfg.format)).string();
    }
    return resolve_out(cfg, stem);
}

Table ecdf_table(const TandemParams& params, std::uint64_t packets, std::uint64_t warmup,
                 std::uint64_t seed, const std::vector<double>& grid, bool per_case) {
    SimConfig sim_cfg{params, packets, warmup, seed};
    auto sets = simulate_empirical(sim_cfg);
    Table table;
    table.meta["paoi_samples"] = sets.total.n();
    table.meta["seed"] = seed;
    table.columns = {"tau", "ecdf_total"};
    if (per_case) {
        table.columns.insert(table.columns.end(), {"ecdf_A", "ecdf_B", "ecdf_C", "ecdf_D"});
    }
    for (double tau : grid) {
        std::vector<double> row{tau, sets.total.ecdf(tau)};
        if (per_case) {
            for (auto& oc : sets.by_case) {
                row.push_back(oc ? oc->ecdf(tau) : std::numeric_limits<double>::quiet_NaN());
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

/// Analytic mixture CDFs for several parameter sets as one multi-column table.
Table cdf_family_table(const std::vector<std::pair<std::string, TandemParams>>& family,
                       const std::vector<double>& grid) {
    Table table;
    table.columns = {"tau"};
    std::vector<std::vector<double>> cols(family.size());
    parallel_for(family.size(), [&](std::size_t i) {
        auto analytic = make_analytic(family[i].second);
        const auto mixture = analytic.mixture_dist();
        CdfEvaluator eval(mixture, analytic.spec);
        cols[i] = eval.cdf_many(grid);
    });
    for (const auto& [name, params] : family) {
        table.columns.push_back("cdf_" + name);
    }
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::vector<double> row{grid[g]};
        for (const auto& col : cols) row.push_back(col[g]);
        table.rows.push_back(std::move(row));
    }
    return table;
}

double optimal_lambda_for(const std::function<TandemParams(double)>& make,
                          const std::vector<double>& lambda_grid) {
    double best_l = lambda_grid.front();
    double best_q = std::numeric_limits<double>::infinity();
    for (double l : lambda_grid) {
        auto params = make(l);
        if (!params.stable()) continue;
        auto analytic = make_analytic(params);
        auto spec = analytic.spec;
        spec.tail_residual = std::min(spec.tail_residual, 1e-6);
        const auto mixture = analytic.mixture_dist();
        CdfEvaluator eval(mixture, spec);
        const double q = eval.quantile(0.99);
        if (q < best_q) {
            best_q = q;
            best_l = l;
        }
    }
    return best_l;
}

int run_reproduce(const CliConfig& cfg) {
    const json base_cfg = config_json(cfg);
    const auto grid = linspace(0.0, 30.0, 601);
    auto write_part = [&](const std::string& part, Table table, const json& extra) {
        table.meta["config"] = base_cfg;
        table.meta["figure_part"] = part;
        for (auto it = extra.begin(); it != extra.end(); ++it) {
            table.meta[it.key()] = it.value();
        }
        write_table(table, part_path(cfg, part), cfg.format);
    };
    const auto table2_md1 = TandemParams::md1(0.5, 1.0, 0.8);

    if (cfg.figure == "fig4") {
        // M/M/1 - M/D/1 per-case PAoI CDFs at the default parameter set.
        Table ana = analytic_curve_table(table2_md1, grid);
        write_part("analytic", std::move(ana),
                   {{"params", {{"lambda", 0.5}, {"mu1", 1.0}, {"service_d", 0.8}}}});
        Table sim = ecdf_table(table2_md1, cfg.packets, cfg.warmup, cfg.seed, grid, true);
        write_part("sim", std::move(sim), {});
        return kExitOk;
    }
    if (cfg.figure == "fig5") {
        // (a) generation-rate comparison; (b) bottleneck swaps built from the
        // stated 1.2 / 1.6 rate pairs (D = 1/rate on the deterministic side).
        const std::vector<std::pair<std::string, TandemParams>> fam_a = {
            {"lam0.25", TandemParams::md1(0.25, 1.0, 0.8)},
            {"lam0.5", table2_md1},
            {"lam0.75", TandemParams::md1(0.75, 1.0, 0.8)},
        };
        write_part("a_analytic", cdf_family_table(fam_a, grid), {});
        const std::vector<std::pair<std::string, TandemParams>> fam_b = {
            {"mu1_1_d_1over1.2", TandemParams::md1(0.5, 1.0, 1.0 / 1.2)},
            {"mu1_1.2_d_1", TandemParams::md1(0.5, 1.2, 1.0)},
            {"mu1_1_d_1over1.6", TandemParams::md1(0.5, 1.0, 1.0 / 1.6)},
            {"mu1_1.6_d_1", TandemParams::md1(0.5, 1.6, 1.0)},
        };
        write_part("b_analytic", cdf_family_table(fam_b, grid),
                   {{"note", "swap pairs inferred from the stated 1.2/1.6 rate pairs"}});
        std::uint64_t seed = cfg.seed;
        for (const auto* fam : {&fam_a, &fam_b}) {
            for (const auto& [name, params] : *fam) {
                Table sim = ecdf_table(params, cfg.packets, cfg.warmup, seed++, grid, false);
                write_part("sim_" + name, std::move(sim), {});
            }
        }
        return kExitOk;
    }
    if (cfg.figure == "fig6") {
        // M/M/1 - M/M/1 per-case CDFs; the result text uses mu2 = 1.2 here.
        const auto params = TandemParams::mm1(0.5, 1.0, 1.2);
        Table ana = analytic_curve_table(params, grid);
        write_part("analytic", std::move(ana),
                   {{"params", {{"lambda", 0.5}, {"mu1", 1.0}, {"mu2", 1.2}}}});
        Table sim = ecdf_table(params, cfg.packets, cfg.warmup, cfg.seed, grid, true);
        write_part("sim", std::move(sim), {});
        return kExitOk;
    }
    if (cfg.figure == "fig7") {
        // (a) generation-rate comparison; (b) mu swaps for mu2 in {1.2, 1.6}.
        const std::vector<std::pair<std::string, TandemParams>> fam_a = {
            {"lam0.25", TandemParams::mm1(0.25, 1.0, 1.25)},
            {"lam0.5", TandemParams::mm1(0.5, 1.0, 1.25)},
            {"lam0.75", TandemParams::mm1(0.75, 1.0, 1.25)},
        };
        write_part("a_analytic", cdf_family_table(fam_a, grid), {});
        const std::vector<std::pair<std::string, TandemParams>> fam_b = {
            {"mu1_1_mu2_1.2", TandemParams::mm1(0.5, 1.0, 1.2)},
            {"mu1_1.2_mu2_1", TandemParams::mm1(0.5, 1.2, 1.0)},
            {"mu1_1_mu2_1.6", TandemParams::mm1(0.5, 1.0, 1.6)},
            {"mu1_1.6_mu2_1", TandemParams::mm1(0.5, 1.6, 1.0)},
        };
        write_part("b_analytic", cdf_family_table(fam_b, grid), {});
        std::uint64_t seed = cfg.seed;
        for (const auto* fam : {&fam_a, &fam_b}) {
            for (const auto& [name, params] : *fam) {
                Table sim = ecdf_table(params, cfg.packets, cfg.warmup, seed++, grid, false);
                write_part("sim_" + name, std::move(sim), {});
            }
        }
        return kExitOk;
    }
    if (cfg.figure == "fig8") {
        // Tail percentiles: (a) vs lambda for both tandems, then vs the
        // second server's speed at the per-point 99th-percentile-optimal
        // lambda: (b) deterministic D, (c) exponential mu2.
        std::vector<double> lambdas;
        for (int i = 1; i <= 19; ++i) lambdas.push_back(0.05 * i);
        const std::vector<double> percentiles = {0.95, 0.99, 0.999};
        {
            Table table;
            table.columns = {"lambda",  "md1_p95", "md1_p99", "md1_p99.9",
                             "mm1_p95", "mm1_p99", "mm1_p99.9"};
            std::vector<std::array<std::vector<double>, 2>> qs(lambdas.size());
            parallel_for(lambdas.size(), [&](std::size_t i) {
                qs[i][0] =
                    sweep_point(TandemParams::md1(lambdas[i], 1.0, 0.8), percentiles).quantiles;
                qs[i][1] =
                    sweep_point(TandemParams::mm1(lambdas[i], 1.0, 1.25), percentiles).quantiles;
            });
            for (std::size_t i = 0; i < lambdas.size(); ++i) {
                std::vector<double> row{lambdas[i]};
                row.insert(row.end(), qs[i][0].begin(), qs[i][0].end());
                row.insert(row.end(), qs[i][1].begin(), qs[i][1].end());
                table.rows.push_back(std::move(row));
            }
            write_part("a_percentiles_vs_lambda", std::move(table), {});
        }
        const std::vector<double> search{0.30, 0.35, 0.40, 0.45, 0.50, 0.55, 0.60, 0.65};
        {
            const std::vector<double> ds = {0.25, 0.4, 0.5, 0.625, 0.8, 1.0, 1.25};
            Table table;
            table.columns = {"service_d", "optimal_lambda", "p95", "p99", "p99.9", "mean"};
            std::vector<std::vector<double>> rows(ds.size());
            parallel_for(ds.size(), [&](std::size_t i) {
                const double d = ds[i];
                const double l_opt = optimal_lambda_for(
                    [&](double l) { return TandemParams::md1(l, 1.0, d); }, search);
                auto row = sweep_point(TandemParams::md1(l_opt, 1.0, d), percentiles);
                rows[i] = {d, l_opt, row.quantiles[0], row.quantiles[1], row.quantiles[2],
                           row.mean};
            });
            table.rows = std::move(rows);
            write_part("b_percentiles_vs_d", std::move(table),
                       {{"lambda_search_grid", search}});
        }
        {
            const std::vector<double> mu2s = {1.05, 1.1, 1.2, 1.4, 1.6, 2.0, 2.5, 10.0 / 3.0,
                                              5.0};
            Table table;
            table.columns = {"mu2", "optimal_lambda", "p95", "p99", "p99.9", "mean"};
            std::vector<std::vector<double>> rows(mu2s.size());
            parallel_for(mu2s.size(), [&](std::size_t i) {
                const double m2 = mu2s[i];
                const double l_opt = optimal_lambda_for(
                    [&](double l) { return TandemParams::mm1(l, 1.0, m2); }, search);
                auto row = sweep_point(TandemParams::mm1(l_opt, 1.0, m2), percentiles);
                rows[i] = {m2, l_opt, row.quantiles[0], row.quantiles[1], row.quantiles[2],
                           row.mean};
            });
            table.rows = std::move(rows);
            write_part("c_percentiles_vs_mu2", std::move(table),
                       {{"lambda_search_grid", search}});
        }
        return kExitOk;
    }
    if (cfg.figure == "fig9") {
        // Cross-system CDF comparison (analytic curves only).
        const std::vector<std::pair<std::string, TandemParams>> fam = {
            {"mm1_mu2_1.25", TandemParams::mm1(0.5, 1.0, 1.25)},
            {"md1_d_0.8", table2_md1},
            {"md1_d_1", TandemParams::md1(0.5, 1.0, 1.0)},
        };
        write_part("analytic", cdf_family_table(fam, grid), {});
        return kExitOk;
    }
    if (cfg.figure == "fig10") {
        // Average PAoI vs lambda for both tandems (analytic curves only).
        std::vector<double> lambdas;
        for (int i = 1; i <= 19; ++i) lambdas.push_back(0.05 * i);
        Table table;
        table.columns = {"lambda", "mean_md1_d_0.8", "mean_md1_d_1", "mean_mm1_mu2_1.25"};
        std::vector<std::vector<double>> rows(lambdas.size());
        parallel_for(lambdas.size(), [&](std::size_t i) {
            const double l = lambdas[i];
            auto mean_of = [](const TandemParams& params) {
                if (!params.stable()) return std::numeric_limits<double>::quiet_NaN();
                auto analytic = make_analytic(params);
                const auto mixture = analytic.mixture_dist();
                CdfEvaluator eval(mixture, analytic.spec);
                return eval.mean();
            };
            rows[i] = {l, mean_of(TandemParams::md1(l, 1.0, 0.8)),
                       mean_of(TandemParams::md1(l, 1.0, 1.0)),
                       mean_of(TandemParams::mm1(l, 1.0, 1.25))};
        });
        table.rows = std::move(rows);
        write_part("mean_vs_lambda", std::move(table), {});
        return kExitOk;
    }
    throw CLI::ValidationError("--figure", "unknown figure id '" + cfg.figure +
                                               "' (expected fig4..fig10)");
}

} // namespace

int main(int argc, char** argv) {
    CliConfig cfg;
    CLI::App app{"Peak-age-of-information toolkit for two-queue FCFS tandems"};
    app.add_option("--mode", cfg.mode, "analytic | simulate | compare | sweep | reproduce")
        ->check(CLI::IsMember({"analytic", "simulate", "compare", "sweep", "reproduce"}));
    app.add_option("--tandem", cfg.tandem, "md1 | mm1")->check(CLI::IsMember({"md1", "mm1"}));
    app.add_option("--lambda", cfg.lambda, "packet generation rate")
        ->check(CLI::PositiveNumber);
    app.add_option("--mu1", cfg.mu1, "first server rate")->check(CLI::PositiveNumber);
    app.add_option("--mu2", cfg.mu2, "second server rate (mm1)")->check(CLI::PositiveNumber);
    app.add_option("--service-d", cfg.service_d, "second server service time (md1)")
        ->check(CLI::PositiveNumber);
    app.add_option("--packets", cfg.packets, "packets to simulate");
    app.add_option("--warmup", cfg.warmup, "warm-up packets to discard");
    app.add_option("--seed", cfg.seed, "RNG seed");
    app.add_option("--tau-min", cfg.tau_min, "curve grid start");
    app.add_option("--tau-max", cfg.tau_max, "curve grid end");
    app.add_option("--tau-points", cfg.tau_points, "curve grid points")
        ->check(CLI::Range(std::size_t{2}, std::size_t{10'000'000}));
    app.add_option("--sweep-param", cfg.sweep_param, "lambda | mu1 | mu2 | service-d");
    app.add_option("--sweep-values", cfg.sweep_values, "sweep points")->delimiter(',');
    app.add_option("--percentiles", cfg.percentiles, "sweep percentiles")->delimiter(',');
    app.add_option("--out", cfg.out,
                   "output file (reproduce: output directory); default $PAOI_OUT_DIR "
                   "or the working directory");
    app.add_option("--format", cfg.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--figure", cfg.figure, "figure id for reproduce mode (fig4..fig10)");
    app.add_option("--dump-records", cfg.dump_records, "raw per-packet CSV dump (simulate)");
    app.add_option("--sim-lambda", cfg.sim_lambda,
                   "compare mode: simulate at this rate instead (sensitivity check)");

    try {
        app.parse(argc, argv);
        if (cfg.tau_max <= cfg.tau_min) {
            throw CLI::ValidationError("--tau-max", "tau-max must exceed tau-min");
        }
        for (double p : cfg.percentiles) {
            if (!(p > 0.0 && p < 1.0)) {
                throw CLI::ValidationError("--percentiles", "percentiles must lie in (0,1)");
            }
        }
        if (cfg.mode == "analytic") return run_analytic(cfg);
        if (cfg.mode == "simulate") return run_simulate(cfg);
        if (cfg.mode == "compare") return run_compare(cfg);
        if (cfg.mode == "sweep") return run_sweep(cfg);
        if (cfg.mode == "reproduce") return run_reproduce(cfg);
        throw CLI::ValidationError("--mode", "unhandled mode");
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e); // --help
        }
        app.exit(e);
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}
