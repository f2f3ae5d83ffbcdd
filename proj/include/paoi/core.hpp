#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <variant>

namespace paoi {

/// Thrown by analytic evaluators when the queueing parameters violate the
/// stability conditions (lambda < mu1 and lambda*D < 1 or lambda < mu2).
class UnstableParamsError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct DeterministicService {
    double duration; // service time D of the second server
};

struct ExponentialService {
    double rate; // service rate mu2 of the second server
};

using ServerSpec = std::variant<DeterministicService, ExponentialService>;

/// Parameters of the two-queue tandem: Poisson generation at rate lambda,
/// exponential first server at rate mu1, and a second server that is either
/// deterministic (M/D/1) or exponential (M/M/1).
///
/// Construction validates positivity only; stability is a separate query so
/// that the simulator can run (and flag) unstable configurations while the
/// analytic evaluators reject them.
class TandemParams {
public:
    TandemParams(double lambda, double mu1, ServerSpec second);

    static TandemParams md1(double lambda, double mu1, double service_d);
    static TandemParams mm1(double lambda, double mu1, double mu2);

    double lambda() const { return lambda_; }
    double mu1() const { return mu1_; }
    const ServerSpec& second() const { return second_; }

    bool second_is_deterministic() const;
    double service_d() const; // throws std::logic_error if second server is exponential
    double mu2() const;       // throws std::logic_error if second server is deterministic

    double alpha1() const { return mu1_ - lambda_; }
    double alpha2() const { return mu2() - lambda_; }
    double rho1() const { return lambda_ / mu1_; }
    /// Utilization of the second queue: lambda*D (deterministic) or lambda/mu2.
    double rho2() const;

    bool stable() const;
    void require_stable() const; // throws UnstableParamsError

private:
    double lambda_;
    double mu1_;
    ServerSpec second_;
};

enum class CaseLabel : std::uint8_t { A = 0, B = 1, C = 2, D = 3 };

inline constexpr std::array<CaseLabel, 4> kAllCases{CaseLabel::A, CaseLabel::B,
                                                    CaseLabel::C, CaseLabel::D};

char to_char(CaseLabel c);
CaseLabel case_from_char(char c); // throws std::invalid_argument

/// Queueing-occupancy classification of a packet from its extended waiting
/// times. The boundary value 0 maps to the "not queued" side, so (0,0) is D.
CaseLabel classify_case(double omega1, double omega2);

/// Peak age of a packet: interarrival time plus the two per-system times.
double paoi_from_record(double y, double t1, double t2);

/// Per-packet timestamps and derived quantities produced by the simulator.
/// y, omega1/2, delta and case_label are undefined (NaN / has_paoi=false) for
/// the very first packet of a stream, which has no predecessor.
struct PacketRecord {
    std::uint64_t index = 0;
    double g = 0.0;  // generation instant (= arrival at system 1)
    double y = std::numeric_limits<double>::quiet_NaN();
    double s1 = 0.0;
    double s2 = 0.0;
    double omega1 = std::numeric_limits<double>::quiet_NaN();
    double omega2 = std::numeric_limits<double>::quiet_NaN();
    double w1 = 0.0;
    double w2 = 0.0;
    double t1 = 0.0;
    double t2 = 0.0;
    double delta = std::numeric_limits<double>::quiet_NaN();
    CaseLabel case_label = CaseLabel::D;
    bool has_paoi = false;
};

} // namespace paoi
