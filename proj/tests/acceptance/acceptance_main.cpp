// Acceptance suite: one pass/fail line per criterion, exit code 0 only if all
// criteria hold. Thresholds are fixed here, calibrated for 1e6-packet runs.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "paoi/core.hpp"
#include "paoi/md1_tandem.hpp"
#include "paoi/mm1_tandem.hpp"
#include "paoi/numerics.hpp"
#include "paoi/rng.hpp"
#include "paoi/sim.hpp"

using namespace paoi;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("%s criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Analytic {
    CaseProbabilities probs;
    double support_lower;
    QuadratureSpec spec;
    std::function<double(double)> mixture_pdf;
    std::array<std::function<double(double)>, 4> case_pdf;
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

/// Mixture quantile with a horizon matched to the requested percentile and a
/// bracket-retry in case the tail constant exceeds the initial allowance.
double mixture_quantile(const TandemParams& params, double p) {
    auto analytic = make_analytic(params);
    MixedDistribution mixture{analytic.mixture_pdf, {}, analytic.support_lower};
    double residual = (1.0 - p) * std::exp(-2.0);
    for (int attempt = 0; attempt < 6; ++attempt) {
        QuadratureSpec spec = analytic.spec;
        spec.tail_residual = residual;
        try {
            CdfEvaluator eval(mixture, spec);
            return eval.quantile(p);
        } catch (const BracketError&) {
            residual *= 0.1;
        }
    }
    throw BracketError("quantile horizon retries exhausted");
}

const TandemParams kMd1TableII = TandemParams::md1(0.5, 1.0, 0.8);
const TandemParams kMm1TableII = TandemParams::mm1(0.5, 1.0, 1.25);

// Simulated PAoI sets reused by criteria 3, 5 and 9.
struct SimResults {
    EmpiricalSets md1;
    EmpiricalSets mm1;
};

// ------------------------------------------------------------- criterion 1 --

void criterion_normalization() {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<TandemParams> grid = {
        // M/M/1 -> M/D/1 half of the grid
        TandemParams::md1(0.2, 1.0, 0.8), TandemParams::md1(0.5, 1.0, 0.8),
        TandemParams::md1(0.75, 1.0, 0.8), TandemParams::md1(0.5, 2.0, 0.5),
        TandemParams::md1(1.0, 2.0, 0.5), TandemParams::md1(1.5, 2.0, 0.5),
        TandemParams::md1(0.3, 1.0, 1.25), TandemParams::md1(0.6, 1.0, 1.25),
        TandemParams::md1(0.3, 0.8, 1.0), TandemParams::md1(0.5, 0.8, 1.0),
        // M/M/1 -> M/M/1 half, including equal-rate and degenerate points
        TandemParams::mm1(0.5, 1.0, 1.25), TandemParams::mm1(0.75, 1.0, 1.25),
        TandemParams::mm1(0.3, 1.0, 1.0), TandemParams::mm1(0.5, 1.0, 1.5),
        TandemParams::mm1(0.9, 1.0, 1.1), TandemParams::mm1(0.4, 2.0, 0.9),
        TandemParams::mm1(1.2, 2.0, 1.6), TandemParams::mm1(0.2, 0.5, 0.4),
        TandemParams::mm1(0.5, 1.2, 0.7), TandemParams::mm1(0.35, 0.9, 1.8),
    };
    double worst_mix = 0.0, worst_cond = 0.0;
    for (const auto& params : grid) {
        auto analytic = make_analytic(params, 1e-8);
        QuadratureSpec spec = analytic.spec;
        spec.tail_residual = 3e-8;
        MixedDistribution mixture{analytic.mixture_pdf, {}, analytic.support_lower};
        worst_mix = std::max(worst_mix,
                             std::abs(CdfEvaluator(mixture, spec).total_mass() - 1.0));
        for (auto label : kAllCases) {
            MixedDistribution cond{analytic.case_pdf[static_cast<std::size_t>(label)], {},
                                   analytic.support_lower};
            worst_cond = std::max(worst_cond,
                                  std::abs(CdfEvaluator(cond, spec).total_mass() - 1.0));
        }
    }
    const double dt = seconds_since(t0);
    std::ostringstream os;
    os << "normalization on 20-point grid: max |mixture-1| = " << worst_mix
       << ", max |conditional-1| = " << worst_cond << ", runtime " << dt << " s (< 30 s)";
    report(1, worst_mix <= 1e-6 && worst_cond <= 1e-6 && dt < 30.0, os.str());
}

// ------------------------------------------------------------- criterion 2 --

void criterion_probability_identities() {
    RngStream rng(20240601);
    double worst_sum_md1 = 0.0, worst_sum_mm1 = 0.0, worst_ident = 0.0;
    for (int i = 0; i < 1000; ++i) {
        {
            const double mu1 = 0.3 + 2.5 * rng.uniform_open();
            const double d = 0.1 + 1.4 * rng.uniform_open();
            const double lam = 0.95 * std::min(mu1, 1.0 / d) * rng.uniform_open();
            auto p = case_probabilities_md1(TandemParams::md1(lam, mu1, d));
            worst_sum_md1 = std::max(worst_sum_md1, std::abs(p.sum() - 1.0));
            worst_ident = std::max(worst_ident, std::abs(p.c - (lam * d - p.a)));
            worst_ident = std::max(worst_ident, std::abs(p.d - ((1.0 - lam * d) - p.b)));
        }
        {
            const double mu1 = 0.3 + 2.5 * rng.uniform_open();
            const double mu2 = 0.3 + 2.5 * rng.uniform_open();
            const double lam = 0.95 * std::min(mu1, mu2) * rng.uniform_open();
            auto p = case_probabilities_mm1(TandemParams::mm1(lam, mu1, mu2));
            worst_sum_mm1 = std::max(worst_sum_mm1, std::abs(p.sum() - 1.0));
        }
    }
    std::ostringstream os;
    os << "probability identities over 1000 random tuples: max |sum-1| md1 = " << worst_sum_md1
       << ", mm1 = " << worst_sum_mm1 << ", max md1 C/D identity gap = " << worst_ident;
    report(2, worst_sum_md1 <= 1e-12 && worst_sum_mm1 <= 1e-12 && worst_ident <= 1e-12,
           os.str());
}

// ------------------------------------------------------------- criterion 3 --

SimResults criterion_sim_agreement() {
    const auto t0 = std::chrono::steady_clock::now();
    SimResults results{simulate_empirical({kMd1TableII, 1'001'000, 1000, 42}),
                       simulate_empirical({kMm1TableII, 1'001'000, 1000, 43})};
    bool pass = true;
    std::ostringstream os;
    os << "analytic vs simulation at n=1e6:";
    const std::array<std::pair<const TandemParams*, EmpiricalSets*>, 2> jobs = {
        std::make_pair(&kMd1TableII, &results.md1), std::make_pair(&kMm1TableII, &results.mm1)};
    for (auto [params, sets] : jobs) {
        auto analytic = make_analytic(*params);
        MixedDistribution mixture{analytic.mixture_pdf, {}, analytic.support_lower};
        CdfEvaluator eval(mixture, analytic.spec);
        const double ks = ks_distance_from_values(eval.cdf_many(sets->total.samples()),
                                                  sets->total);
        const char* tag = params->second_is_deterministic() ? "md1" : "mm1";
        os << " " << tag << " ks_total=" << ks;
        pass = pass && ks < 0.005;
        const auto probs = analytic.probs.as_array();
        double worst_case_ks = 0.0, worst_z = 0.0;
        for (auto label : kAllCases) {
            const auto k = static_cast<std::size_t>(label);
            MixedDistribution cond{analytic.case_pdf[k], {}, analytic.support_lower};
            CdfEvaluator cond_eval(cond, analytic.spec);
            const double cks = ks_distance_from_values(
                cond_eval.cdf_many(sets->by_case[k]->samples()), *sets->by_case[k]);
            worst_case_ks = std::max(worst_case_ks, cks);
            worst_z = std::max(worst_z,
                               std::abs(binomial_z(sets->counts[k], sets->total.n(), probs[k])));
        }
        os << " ks_case_max=" << worst_case_ks << " |z|_max=" << worst_z;
        pass = pass && worst_case_ks < 0.01 && worst_z < 4.0;
    }
    const double dt = seconds_since(t0);
    os << ", runtime " << dt << " s (< 120 s)";
    report(3, pass && dt < 120.0, os.str());
    return results;
}

// ------------------------------------------------------------- criterion 4 --

void criterion_wait_oracle() {
    auto samples = simulate_md1_queue(0.5, 0.8, 1'001'000, 1000, 44);
    std::vector<double> waits;
    waits.reserve(samples.size());
    std::size_t zeros = 0;
    for (const auto& s : samples) {
        waits.push_back(s.wait);
        zeros += s.wait == 0.0 ? 1 : 0;
    }
    EmpiricalDistribution emp(std::move(waits));
    Md1Wait wait(0.5, 0.8);
    const double ks =
        ks_distance([&](double w) { return wait.cdf(w); }, emp, {{0.0, wait.atom()}});
    const double z = binomial_z(zeros, emp.n(), 0.6);
    std::ostringstream os;
    os << "M/D/1 waiting-time oracle: ks = " << ks << ", zero-wait |z| = " << std::abs(z);
    report(4, ks < 0.005 && std::abs(z) < 4.0, os.str());
}

// ------------------------------------------------------------- criterion 5 --

void criterion_support_bound(const SimResults& sims) {
    auto analytic = make_analytic(kMd1TableII);
    MixedDistribution mixture{analytic.mixture_pdf, {}, analytic.support_lower};
    CdfEvaluator eval(mixture, analytic.spec);
    std::vector<double> grid;
    for (int i = 0; i <= 4000; ++i) grid.push_back(1.6 * i / 4000.0 * 0.9999);
    const auto vals = eval.cdf_many(grid);
    double max_below = 0.0;
    for (double v : vals) max_below = std::max(max_below, v);
    const double min_delta = sims.md1.total.min();
    std::ostringstream os;
    os << "support bound: max CDF below 2D = " << max_below
       << ", min simulated PAoI = " << min_delta << " (>= " << 1.6 - 1e-9 << ")";
    report(5, max_below == 0.0 && min_delta >= 1.6 - 1e-9, os.str());
}

// ------------------------------------------------------------- criterion 6 --

void criterion_equal_rate_limit() {
    double worst = 0.0;
    for (double sign : {1.0, -1.0}) {
        Mm1TandemPaoi general(TandemParams::mm1(0.5, 1.0, 1.0 + sign * 1e-4));
        for (double tau = 0.0; tau <= 20.0; tau += 0.05) {
            for (auto label : kAllCases) {
                worst = std::max(worst, std::abs(general.case_pdf(label, tau) -
                                                 paoi_pdf_mm1_equal(label, tau, 0.5, 1.0)));
            }
        }
    }
    double worst_bc = 0.0;
    for (double tau = 0.0; tau <= 20.0; tau += 0.05) {
        worst_bc = std::max(worst_bc, std::abs(paoi_pdf_mm1_equal(CaseLabel::B, tau, 0.5, 1.0) -
                                               paoi_pdf_mm1_equal(CaseLabel::C, tau, 0.5, 1.0)));
    }
    std::ostringstream os;
    os << "equal-rate limit: max |general(mu2=mu(1+-1e-4)) - equal| = " << worst
       << ", max |B - C| = " << worst_bc;
    report(6, worst < 1e-3 && worst_bc == 0.0, os.str());
}

// ------------------------------------------------------------- criterion 7 --

void criterion_optimal_lambda() {
    const auto t0 = std::chrono::steady_clock::now();
    double best_md1 = 0.0, best_mm1 = 0.0;
    double q_md1 = std::numeric_limits<double>::infinity();
    double q_mm1 = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 19; ++i) {
        const double lam = 0.05 * i;
        const double qa = mixture_quantile(TandemParams::md1(lam, 1.0, 0.8), 0.99);
        if (qa < q_md1) {
            q_md1 = qa;
            best_md1 = lam;
        }
        const double qb = mixture_quantile(TandemParams::mm1(lam, 1.0, 1.25), 0.99);
        if (qb < q_mm1) {
            q_mm1 = qb;
            best_mm1 = lam;
        }
    }
    const double dt = seconds_since(t0);
    std::ostringstream os;
    os << "optimal-lambda sweep: argmin p99 md1 = " << best_md1 << " (p99 = " << q_md1
       << "), mm1 = " << best_mm1 << " (p99 = " << q_mm1 << "), runtime " << dt
       << " s (< 60 s)";
    const bool in_range = best_md1 >= 0.40 && best_md1 <= 0.55 && best_mm1 >= 0.40 &&
                          best_mm1 <= 0.55;
    report(7, in_range && dt < 60.0, os.str());
}

// ------------------------------------------------------------- criterion 8 --

void criterion_cross_system_ordering() {
    const auto md1_d1 = TandemParams::md1(0.5, 1.0, 1.0);
    const double md1_p80 = mixture_quantile(md1_d1, 0.80);
    const double mm1_p80 = mixture_quantile(kMm1TableII, 0.80);
    const double md1_p20 = mixture_quantile(md1_d1, 0.20);
    const double mm1_p20 = mixture_quantile(kMm1TableII, 0.20);
    std::ostringstream os;
    os << "cross-system ordering: p80 md1(D=1) = " << md1_p80 << " < mm1 = " << mm1_p80
       << "; p20 md1 = " << md1_p20 << " > mm1 = " << mm1_p20;
    report(8, md1_p80 < mm1_p80 && md1_p20 > mm1_p20, os.str());
}

// ------------------------------------------------------------- criterion 9 --

void criterion_mean_consistency(const SimResults& sims) {
    bool pass = true;
    std::ostringstream os;
    os << "mean consistency:";
    const std::array<std::pair<const TandemParams*, const EmpiricalSets*>, 2> jobs = {
        std::make_pair(&kMd1TableII, &sims.md1), std::make_pair(&kMm1TableII, &sims.mm1)};
    for (auto [params, sets] : jobs) {
        auto analytic = make_analytic(*params);
        MixedDistribution mixture{analytic.mixture_pdf, {}, analytic.support_lower};
        const double mean_ana = CdfEvaluator(mixture, analytic.spec).mean();
        const double rel = std::abs(mean_ana - sets->total.mean()) / mean_ana;
        os << (params->second_is_deterministic() ? " md1" : " mm1") << " rel_err = " << rel;
        pass = pass && rel < 0.01;
    }
    auto mean_of = [](const TandemParams& params) {
        auto analytic = make_analytic(params);
        MixedDistribution mixture{analytic.mixture_pdf, {}, analytic.support_lower};
        return CdfEvaluator(mixture, analytic.spec).mean();
    };
    const double md1_75 = mean_of(TandemParams::md1(0.75, 1.0, 0.8));
    const double mm1_75 = mean_of(TandemParams::mm1(0.75, 1.0, 1.25));
    os << "; lambda=0.75 means md1 = " << md1_75 << " < mm1 = " << mm1_75;
    pass = pass && md1_75 < mm1_75;
    report(9, pass, os.str());
}

// ------------------------------------------------------------ criterion 10 --

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void criterion_determinism() {
    const fs::path dir = fs::temp_directory_path() / "paoi_acceptance_determinism";
    fs::create_directories(dir);
    const std::string cli = PAOI_CLI_PATH;
    const std::string base = cli +
                             " --mode simulate --tandem md1 --packets 200000 --warmup 1000 "
                             "--seed 777 ";
    const fs::path out1 = dir / "run1.csv";
    const fs::path out2 = dir / "run2.csv";
    const fs::path dump1 = dir / "dump1.csv";
    const fs::path dump2 = dir / "dump2.csv";
    int rc1 = std::system((base + "--dump-records " + dump1.string() + " --out " +
                           out1.string() + " >/dev/null 2>&1")
                              .c_str());
    int rc2 = std::system((base + "--dump-records " + dump2.string() + " --out " +
                           out2.string() + " >/dev/null 2>&1")
                              .c_str());
    const bool ran = WEXITSTATUS(rc1) == 0 && WEXITSTATUS(rc2) == 0;
    const bool identical = ran && slurp(out1) == slurp(out2) && slurp(dump1) == slurp(dump2);
    std::ostringstream os;
    os << "determinism: two seeded simulate runs byte-identical (ecdf + raw dumps)";
    report(10, identical, os.str());
    fs::remove_all(dir);
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion_normalization();
    criterion_probability_identities();
    auto sims = criterion_sim_agreement();
    criterion_wait_oracle();
    criterion_support_bound(sims);
    criterion_equal_rate_limit();
    criterion_optimal_lambda();
    criterion_cross_system_ordering();
    criterion_mean_consistency(sims);
    criterion_determinism();
    std::printf("%d/10 criteria passed in %.1f s\n", 10 - g_failures, seconds_since(t0));
    return g_failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
