#include "paoi/sim.hpp"

#include <cmath>
#include <limits>

namespace paoi {

TandemSimulator::TandemSimulator(const SimConfig& config)
    : config_(config), rng_(config.seed) {
    if (config_.n_packets <= config_.n_warmup) {
        throw std::invalid_argument("n_packets must exceed n_warmup");
    }
}

PacketRecord TandemSimulator::advance() {
    const auto& p = config_.params;
    PacketRecord rec;
    rec.index = ++produced_;

    const double y = rng_.exponential(p.lambda());
    const double g = have_prev_ ? prev_g + y : y;
    const double s1 = rng_.exponential(p.mu1());
    const double s2 = p.second_is_deterministic() ? p.service_d() : rng_.exponential(p.mu2());

    const double d1 = std::max(g, have_prev_ ? prev_d1 : 0.0) + s1;
    const double d2 = std::max(d1, have_prev_ ? prev_d2 : 0.0) + s2;
    if (!std::isfinite(d2)) {
        throw std::overflow_error("simulated clock exceeded representable range");
    }

    rec.g = g;
    rec.s1 = s1;
    rec.s2 = s2;
    rec.t1 = d1 - g;
    rec.t2 = d2 - d1;
    if (have_prev_) {
        rec.y = y;
        // Omega_{i,1} = T_{i-1,1} - Y_i = d1_{i-1} - g_i
        // Omega_{i,2} = T_{i-1,2} - Y_{i,2} = d2_{i-1} - d1_i
        rec.omega1 = prev_d1 - g;
        rec.omega2 = prev_d2 - d1;
        rec.w1 = std::max(rec.omega1, 0.0);
        rec.w2 = std::max(rec.omega2, 0.0);
        rec.delta = d2 - prev_g;
        rec.case_label = classify_case(rec.omega1, rec.omega2);
        rec.has_paoi = true;
    } else {
        rec.w1 = 0.0;
        rec.w2 = 0.0;
        rec.has_paoi = false;
    }

    prev_g = g;
    prev_d1 = d1;
    prev_d2 = d2;
    have_prev_ = true;
    return rec;
}

bool TandemSimulator::next(PacketRecord& out) {
    while (produced_ < config_.n_warmup) {
        advance();
    }
    if (produced_ >= config_.n_packets) {
        return false;
    }
    out = advance();
    return true;
}

std::vector<PacketRecord> simulate_tandem(const SimConfig& config) {
    TandemSimulator sim(config);
    std::vector<PacketRecord> records;
    records.reserve(config.n_packets - config.n_warmup);
    PacketRecord rec;
    while (sim.next(rec)) {
        records.push_back(rec);
    }
    return records;
}

namespace {

struct PaoiCollector {
    std::vector<double> total;
    std::array<std::vector<double>, 4> by_case;
    std::size_t n_records = 0;

    void add(const PacketRecord& rec) {
        ++n_records;
        if (!rec.has_paoi) return;
        total.push_back(rec.delta);
        by_case[static_cast<std::size_t>(rec.case_label)].push_back(rec.delta);
    }

    EmpiricalSets finish() {
        if (total.empty()) {
            throw std::invalid_argument("no PAoI samples (empty or single-record stream)");
        }
        EmpiricalSets sets{EmpiricalDistribution(std::move(total)), {}, {}, n_records};
        for (std::size_t k = 0; k < 4; ++k) {
            sets.counts[k] = by_case[k].size();
            if (!by_case[k].empty()) {
                sets.by_case[k].emplace(std::move(by_case[k]));
            }
        }
        return sets;
    }
};

} // namespace

EmpiricalSets empirical_from_records(std::span<const PacketRecord> records) {
    PaoiCollector collector;
    for (const auto& rec : records) {
        collector.add(rec);
    }
    return collector.finish();
}

EmpiricalSets simulate_empirical(const SimConfig& config) {
    TandemSimulator sim(config);
    PaoiCollector collector;
    collector.total.reserve(config.n_packets - config.n_warmup);
    PacketRecord rec;
    while (sim.next(rec)) {
        collector.add(rec);
    }
    return collector.finish();
}

void write_record_csv_row(std::ostream& os, const PacketRecord& r) {
    char buf[360];
    std::snprintf(buf, sizeof(buf),
                  "%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%c\n",
                  static_cast<unsigned long long>(r.index), r.g, r.y, r.s1, r.s2, r.omega1,
                  r.omega2, r.t1, r.t2, r.delta, r.has_paoi ? to_char(r.case_label) : '-');
    os << buf;
}

void write_records_csv(std::ostream& os, std::span<const PacketRecord> records) {
    os << kRecordCsvHeader << "\n";
    for (const auto& r : records) {
        write_record_csv_row(os, r);
    }
}

std::vector<QueueSample> simulate_md1_queue(double lambda, double service_d, std::uint64_t n,
                                            std::uint64_t n_warmup, std::uint64_t seed) {
    if (n <= n_warmup) {
        throw std::invalid_argument("n must exceed n_warmup");
    }
    RngStream rng(seed);
    std::vector<QueueSample> out;
    out.reserve(n - n_warmup);
    double w = 0.0;
    double prev_g = 0.0, g = 0.0, dep = 0.0;
    bool have_prev = false;
    for (std::uint64_t i = 1; i <= n; ++i) {
        const double y = rng.exponential(lambda);
        if (have_prev) {
            w = std::max(0.0, w + service_d - y); // Lindley recursion
        } else {
            w = 0.0;
        }
        prev_g = g;
        g = have_prev ? g + y : y;
        dep = g + w + service_d;
        if (i > n_warmup) {
            const double paoi =
                have_prev ? dep - prev_g : std::numeric_limits<double>::quiet_NaN();
            out.push_back({w, paoi});
        }
        have_prev = true;
    }
    return out;
}

} // namespace paoi
