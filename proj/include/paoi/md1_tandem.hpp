#pragma once

#include <array>

#include "paoi/core.hpp"
#include "paoi/distribution.hpp"
#include "paoi/md1_wait.hpp"
#include "paoi/numerics.hpp"

namespace paoi {

struct CaseProbabilities {
    double a, b, c, d;

    double operator[](CaseLabel label) const {
        switch (label) {
        case CaseLabel::A: return a;
        case CaseLabel::B: return b;
        case CaseLabel::C: return c;
        case CaseLabel::D: return d;
        }
        return 0.0;
    }
    double sum() const { return a + b + c + d; }
    std::array<double, 4> as_array() const { return {a, b, c, d}; }
};

/// Closed-form PAoI evaluator for the M/M/1 -> M/D/1 tandem. All four
/// case-conditional densities share the waiting-time integrals of Md1Wait;
/// the mixture has support [2D, inf) and no atoms.
class Md1TandemPaoi {
public:
    explicit Md1TandemPaoi(const TandemParams& params); // requires stable, deterministic second

    const TandemParams& params() const { return params_; }
    const Md1Wait& wait() const { return wait_; }
    const CaseProbabilities& case_probabilities() const { return probs_; }
    double support_lower() const { return 2.0 * params_.service_d(); }

    /// Conditional density p_{Delta | case}(tau); zero below the case support.
    double case_pdf(CaseLabel label, double tau) const;
    std::array<double, 4> case_pdf_all(double tau) const;
    /// Mixture density sum_X p(X) p_{Delta|X}(tau).
    double mixture_pdf(double tau) const;

private:
    std::array<double, 4> case_numerators(double tau) const;

    TandemParams params_;
    Md1Wait wait_;
    CaseProbabilities probs_;
    // The four cases share every waiting-time integral, and quadrature asks
    // for them at the same tau in bursts; one remembered evaluation removes
    // the duplicate work. Instances are not meant to be shared across
    // threads concurrently (create one per thread instead).
    mutable double memo_tau_ = -1.0;
    mutable std::array<double, 4> memo_nums_{};
};

CaseProbabilities case_probabilities_md1(const TandemParams& params);

double paoi_pdf_md1_case(CaseLabel label, double tau, const TandemParams& params);

MixedDistribution paoi_distribution_md1(const TandemParams& params);

/// PAoI CDF of a single (non-tandem) M/D/1 queue:
/// (1 - e^{-lambda (tau - D)}) P_W(tau - 2D) for tau >= 2D, else 0.
double single_md1_paoi_cdf(double tau, double lambda, double service_d);

/// Quadrature settings matched to the M/D/1 PAoI mixture: kinks at 2D + kD,
/// exponential tail bound with rate min(alpha1, lambda).
QuadratureSpec md1_paoi_quadrature_spec(const TandemParams& params, double abs_tol = 1e-9);

} // namespace paoi
