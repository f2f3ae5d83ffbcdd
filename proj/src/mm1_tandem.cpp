#include "paoi/mm1_tandem.hpp"

#include <cmath>
#include <memory>

namespace paoi {

namespace {

void require_mm1(const TandemParams& params) {
    if (params.second_is_deterministic()) {
        throw std::invalid_argument("M/M/1 -> M/M/1 evaluator needs an exponential second server");
    }
    params.require_stable();
}

TandemParams validated(const TandemParams& params) {
    require_mm1(params);
    return params;
}

/// Rate-gap threshold under which a convolution treats two rates as equal.
/// Chosen so that the 1e-4-relative separations used by the regime-continuity
/// checks still go through the general formulas, while gaps small enough to
/// lose precision collapse to the exact confluent limit.
double merge_tolerance(double lambda, double mu1, double mu2, double tail_rate) {
    const double rate_scale = std::max({lambda, mu1, mu2});
    const double horizon = std::log(1e10) / tail_rate;
    return std::min(std::max(1e-7 * rate_scale, 1e-3 / horizon), 5e-5 * rate_scale);
}

std::array<ExpPoly, 4> build_case_polys(double lam, double mu1, double mu2, double merge_tol) {
    const double a1 = mu1 - lam;
    const double a2 = mu2 - lam;
    const auto E = [](double r) { return ExpPoly::exponential(r); };

    // T_{i-1,1} conditioned on {Y < T_{i-1,1}} (system 1 busy on arrival)
    const ExpPoly t1_busy({{mu1 * a1 / lam, 0, a1}, {-mu1 * a1 / lam, 0, mu1}});
    // T_{i-1,2} conditioned on {S_1 < T_{i-1,2}}
    const ExpPoly t2_busy(
        {{(mu1 + a2) * a2 / mu1, 0, a2}, {-(mu1 + a2) * a2 / mu1, 0, mu1 + a2}});
    // S_1 conditioned on {T_{i-1,2} <= S_1}
    const ExpPoly s1_idle2(
        {{(mu1 + a2) * mu1 / a2, 0, mu1}, {-(mu1 + a2) * mu1 / a2, 0, mu1 + a2}});

    // Case A: Delta = T_{i-1,1} + T_{i-1,2} + S_2, both systems busy.
    ExpPoly pa = t1_busy.convolve(t2_busy, merge_tol).convolve(E(mu2), merge_tol);

    // Case B: Delta = T_{i-1,1} + S_1 + S_2, second system idle.
    ExpPoly pb = t1_busy.convolve(s1_idle2, merge_tol).convolve(E(mu2), merge_tol);

    // Case C: Delta = T_{i-1,1} + T_{i-1,2} + S_2 with system 1 idle; the
    // idle-1 conditioning tilts T_{i-1,1} to Exp(mu1) and conditions
    // T_{i-1,2} on exceeding S_1 + Z, Z ~ Exp(lambda) the residual gap.
    const double nc = (mu1 / (mu1 + a2)) * (lam / mu2);
    const ExpPoly t2_cond({{a2 / nc, 0, a2},
                           {-a2 * mu1 / (a1 * nc), 0, a2 + lam},
                           {a2 * lam / (a1 * nc), 0, a2 + mu1}});
    ExpPoly pc = E(mu1).convolve(t2_cond, merge_tol).convolve(E(mu2), merge_tol);

    // Case D: Delta = T_{i-1,1} + (S_1 + Z) + S_2 with both idle; the pair
    // (S_1, Z) is tilted by P(T_{i-1,2} <= S_1 + Z) = 1 - e^{-a2 (s+z)}.
    const double nd = 1.0 - nc;
    const ExpPoly x_base = E(mu1).convolve(E(lam), merge_tol);
    const ExpPoly x_cond = (x_base + x_base.tilted(a2).scaled(-1.0)).scaled(1.0 / nd);
    ExpPoly pd = E(mu1).convolve(x_cond, merge_tol).convolve(E(mu2), merge_tol);

    return {std::move(pa), std::move(pb), std::move(pc), std::move(pd)};
}

} // namespace

Mm1Regime Mm1Regime::resolve(const TandemParams& params) {
    require_mm1(params);
    const double mu1 = params.mu1();
    const double mu2 = params.mu2();
    const double tol = kTolRel * mu1;
    if (std::abs(mu1 - mu2) <= tol) {
        return {Mm1RegimeKind::EqualRates, mu1};
    }
    if (std::abs(mu2 - params.alpha1()) <= tol || std::abs(mu1 - params.alpha2()) <= tol) {
        return {Mm1RegimeKind::PerturbedDegenerate, mu2 * (1.0 + 1e-6)};
    }
    return {Mm1RegimeKind::General, mu2};
}

CaseProbabilities case_probabilities_mm1(const TandemParams& params) {
    require_mm1(params);
    const double lam = params.lambda();
    const double mu1 = params.mu1();
    const double mu2 = params.mu2();
    const double a1 = params.alpha1();
    const double a2 = params.alpha2();
    const double p_a = lam / (mu1 + a2);
    const double p_b = lam * a2 / (mu1 * (mu1 + a2));
    const double p_c = lam * a1 / (mu2 * (mu1 + a2));
    const double p_d = a1 * (mu2 * (mu1 + a2) - lam * mu1) / (mu1 * mu2 * (mu1 + a2));
    return {p_a, p_b, p_c, p_d};
}

Mm1TandemPaoi::Mm1TandemPaoi(const TandemParams& params)
    : params_(validated(params)), regime_(Mm1Regime::resolve(params_)),
      probs_(case_probabilities_mm1(params_)) {
    const double lam = params_.lambda();
    const double mu1 = params_.mu1();
    const double mu2 = regime_.effective_mu2;
    const double tail = std::min({mu1 - lam, mu2 - lam, lam});
    polys_ = build_case_polys(lam, mu1, mu2, merge_tolerance(lam, mu1, mu2, tail));
    if (regime_.kind == Mm1RegimeKind::EqualRates) {
        // Time reversibility of the symmetric tandem: case C == case B.
        polys_[static_cast<std::size_t>(CaseLabel::C)] =
            polys_[static_cast<std::size_t>(CaseLabel::B)];
    }
}

double Mm1TandemPaoi::case_pdf(CaseLabel label, double tau) const {
    if (std::isnan(tau)) {
        throw std::invalid_argument("tau must not be NaN");
    }
    if (tau < 0.0) return 0.0;
    return std::max(polys_[static_cast<std::size_t>(label)].value(tau), 0.0);
}

double Mm1TandemPaoi::mixture_pdf(double tau) const {
    double acc = 0.0;
    for (auto label : kAllCases) {
        acc += probs_[label] * case_pdf(label, tau);
    }
    return acc;
}

double Mm1TandemPaoi::case_cdf(CaseLabel label, double tau) const {
    return polys_[static_cast<std::size_t>(label)].cdf(tau);
}

double Mm1TandemPaoi::mixture_cdf(double tau) const {
    double acc = 0.0;
    for (auto label : kAllCases) {
        acc += probs_[label] * case_cdf(label, tau);
    }
    return acc;
}

double Mm1TandemPaoi::mixture_mean() const {
    double acc = 0.0;
    for (auto label : kAllCases) {
        acc += probs_[label] * polys_[static_cast<std::size_t>(label)].mean();
    }
    return acc;
}

double paoi_pdf_mm1_case(CaseLabel label, double tau, const TandemParams& params) {
    return Mm1TandemPaoi(params).case_pdf(label, tau);
}

double paoi_pdf_mm1_equal(CaseLabel label, double tau, double lambda, double mu) {
    if (!(lambda < mu)) {
        throw UnstableParamsError("equal-rate M/M/1 tandem requires lambda < mu");
    }
    Mm1TandemPaoi eval(TandemParams::mm1(lambda, mu, mu));
    return eval.case_pdf(label, tau);
}

MixedDistribution paoi_distribution_mm1(const TandemParams& params) {
    auto eval = std::make_shared<Mm1TandemPaoi>(params);
    MixedDistribution dist;
    dist.density = [eval](double tau) { return eval->mixture_pdf(tau); };
    dist.atoms = {};
    dist.support_lower = 0.0;
    return dist;
}

QuadratureSpec mm1_paoi_quadrature_spec(const TandemParams& params, double abs_tol) {
    require_mm1(params);
    QuadratureSpec spec;
    spec.abs_tol = abs_tol;
    spec.tail_rate = std::min({params.alpha1(), params.alpha2(), params.lambda()});
    return spec;
}

} // namespace paoi
