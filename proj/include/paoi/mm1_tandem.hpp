#pragma once

#include <array>

#include "paoi/core.hpp"
#include "paoi/distribution.hpp"
#include "paoi/exp_poly.hpp"
#include "paoi/md1_tandem.hpp"
#include "paoi/numerics.hpp"

namespace paoi {

enum class Mm1RegimeKind { General, EqualRates, PerturbedDegenerate };

/// Resolution of the removable singularities of the M/M/1 - M/M/1 closed
/// forms: equal service rates get the dedicated limit evaluation; the
/// mu2 = alpha1 / mu1 = alpha2 points (no closed form in the source
/// derivation) are evaluated at a 1e-6 relative nudge of mu2.
struct Mm1Regime {
    Mm1RegimeKind kind;
    double effective_mu2;

    static constexpr double kTolRel = 1e-7;
    static Mm1Regime resolve(const TandemParams& params);
};

/// PAoI evaluator for the M/M/1 -> M/M/1 tandem. Case densities are exact
/// exponential-polynomial convolutions of the conditioned factor
/// distributions, so each conditional integrates to one by construction and
/// closed-form CDFs/means are available as an independent cross-check of the
/// quadrature route.
class Mm1TandemPaoi {
public:
    explicit Mm1TandemPaoi(const TandemParams& params); // requires stable, exponential second

    const TandemParams& params() const { return params_; }
    const Mm1Regime& regime() const { return regime_; }
    const CaseProbabilities& case_probabilities() const { return probs_; }

    double case_pdf(CaseLabel label, double tau) const;
    double mixture_pdf(double tau) const;

    const ExpPoly& case_poly(CaseLabel label) const {
        return polys_[static_cast<std::size_t>(label)];
    }
    double case_cdf(CaseLabel label, double tau) const;
    double mixture_cdf(double tau) const;
    double mixture_mean() const;

private:
    TandemParams params_;
    Mm1Regime regime_;
    CaseProbabilities probs_;
    std::array<ExpPoly, 4> polys_;
};

CaseProbabilities case_probabilities_mm1(const TandemParams& params);

double paoi_pdf_mm1_case(CaseLabel label, double tau, const TandemParams& params);

/// Equal-service-rate special case (mu1 = mu2 = mu); case C's density is case
/// B's, which the time-reversibility of the symmetric tandem makes exact.
double paoi_pdf_mm1_equal(CaseLabel label, double tau, double lambda, double mu);

MixedDistribution paoi_distribution_mm1(const TandemParams& params);

/// Quadrature settings for the M/M/1 PAoI mixture: support starts at zero,
/// tail rate min(alpha1, alpha2, lambda), no interior kinks.
QuadratureSpec mm1_paoi_quadrature_spec(const TandemParams& params, double abs_tol = 1e-9);

} // namespace paoi
