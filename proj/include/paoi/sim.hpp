#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "paoi/core.hpp"
#include "paoi/numerics.hpp"
#include "paoi/rng.hpp"

namespace paoi {

struct SimConfig {
    TandemParams params;
    std::uint64_t n_packets = 10'000'000;
    std::uint64_t n_warmup = 1000;
    std::uint64_t seed = 1;
};

/// Streaming discrete-event simulator of the tandem. The Lindley-style
/// departure recursion needs only the previous packet's state, so memory is
/// O(1) regardless of n_packets. Warm-up packets are simulated but not
/// emitted; the last warm-up packet's state carries across the boundary so
/// the first emitted record has a valid interarrival time and PAoI.
///
/// Unstable parameters are allowed (useful for divergence demos); query
/// unstable() to flag them in any output.
class TandemSimulator {
public:
    explicit TandemSimulator(const SimConfig& config); // throws if n_packets <= n_warmup

    /// Produces the next post-warm-up record; returns false when n_packets
    /// have been generated.
    bool next(PacketRecord& out);

    bool unstable() const { return !config_.params.stable(); }
    const SimConfig& config() const { return config_; }

private:
    PacketRecord advance();

    SimConfig config_;
    RngStream rng_;
    std::uint64_t produced_ = 0; // packets generated so far (including warm-up)
    bool have_prev_ = false;
    double prev_g = 0.0, prev_d1 = 0.0, prev_d2 = 0.0;
};

std::vector<PacketRecord> simulate_tandem(const SimConfig& config);

/// PAoI samples split by case, ready for ECDF/KS work. Cases that never
/// occurred carry no distribution.
struct EmpiricalSets {
    EmpiricalDistribution total;
    std::array<std::optional<EmpiricalDistribution>, 4> by_case;
    std::array<std::size_t, 4> counts{};
    std::size_t n_records = 0; // records seen, including any without a PAoI
};

EmpiricalSets empirical_from_records(std::span<const PacketRecord> records);

/// Runs the simulation and collects PAoI samples without storing records.
EmpiricalSets simulate_empirical(const SimConfig& config);

/// One record per line: index,g,y,s1,s2,omega1,omega2,t1,t2,delta,case
/// with a leading header row.
void write_records_csv(std::ostream& os, std::span<const PacketRecord> records);
inline constexpr const char* kRecordCsvHeader = "index,g,y,s1,s2,omega1,omega2,t1,t2,delta,case";
void write_record_csv_row(std::ostream& os, const PacketRecord& record);

/// Standalone M/D/1 queue (Poisson arrivals), used as the oracle for the
/// waiting-time distribution and the single-queue PAoI.
struct QueueSample {
    double wait;
    double paoi; // NaN for the first packet
};

std::vector<QueueSample> simulate_md1_queue(double lambda, double service_d, std::uint64_t n,
                                            std::uint64_t n_warmup, std::uint64_t seed);

} // namespace paoi
