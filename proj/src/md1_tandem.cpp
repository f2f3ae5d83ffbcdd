#include "paoi/md1_tandem.hpp"

#include <cmath>
#include <memory>

namespace paoi {

namespace {

void require_md1(const TandemParams& params) {
    if (!params.second_is_deterministic()) {
        throw std::invalid_argument("M/M/1 -> M/D/1 evaluator needs a deterministic second server");
    }
    params.require_stable();
}

} // namespace

Md1TandemPaoi::Md1TandemPaoi(const TandemParams& params)
    : params_((require_md1(params), params)), wait_(params.lambda(), params.service_d()),
      probs_(case_probabilities_md1(params)) {}

CaseProbabilities case_probabilities_md1(const TandemParams& params) {
    require_md1(params);
    const double lam = params.lambda();
    const double mu1 = params.mu1();
    const double d = params.service_d();
    const double a1 = params.alpha1();
    const double rho1 = params.rho1();
    const double load2 = lam * d;
    const double e = std::exp(-mu1 * d);
    // lam (e^{mu1 D} - 1) / (a1 e^{mu1 D} + lam), written overflow-free
    const double ratio = lam * (1.0 - e) / (a1 + lam * e);
    const double p_b = rho1 * e * (1.0 - load2) * (1.0 + ratio);
    const double p_a = rho1 * (1.0 - (1.0 - load2) * e * (1.0 + ratio));
    const double p_c = load2 - p_a;
    const double p_d = (1.0 - load2) - p_b;
    return {p_a, p_b, p_c, p_d};
}

std::array<double, 4> Md1TandemPaoi::case_numerators(double tau) const {
    if (std::isnan(tau)) {
        throw std::invalid_argument("tau must not be NaN");
    }
    if (tau == memo_tau_) {
        return memo_nums_;
    }
    const double d = params_.service_d();
    const double m = tau - 2.0 * d;
    if (m <= 0.0) {
        return {0.0, 0.0, 0.0, 0.0};
    }
    const double lam = params_.lambda();
    const double mu1 = params_.mu1();
    const double a1 = params_.alpha1();
    const double q = wait_.atom();

    const double pw = wait_.cdf(m);
    const std::array<double, 4> betas{a1, mu1, 0.0, -lam};
    std::array<double, 4> phis{};
    wait_.phi_scaled_many(m, betas, phis);
    const double phis_a1 = phis[0];  // e^{-a1 m} Phi(m, a1)
    const double phis_mu1 = phis[1]; // e^{-mu1 m} Phi(m, mu1)
    const double phi_0 = phis[2];
    const double phi_nl = phis[3];

    // theta variants assembled from the parts-integration identity
    const double ts_a1 = pw - q * std::exp(-a1 * m) - a1 * phis_a1;    // e^{-a1 m} theta(m,a1)
    const double ts_mu1 = pw - q * std::exp(-mu1 * m) - mu1 * phis_mu1;
    const double th_nl = std::exp(-lam * m) * pw - q + lam * phi_nl;   // theta(m,-lam)

    const double e_mu1d = std::exp(-mu1 * d);
    const double e_a1m = std::exp(-a1 * m);
    const double e_mu1m = std::exp(-mu1 * m);

    // Case A: queued at both; Delta = T_{i-1,1} + W_{i-1,2} + 2D.
    const double num_a = a1 * (ts_a1 - e_mu1d * e_a1m * th_nl - ts_mu1 + e_mu1m * e_mu1d * (pw - q)) +
                         a1 * e_a1m * (1.0 - std::exp(-lam * m)) * q * (1.0 - e_mu1d);

    // Case B: queued only at system 1; Delta = T_{i-1,1} + S_1 + D.
    const double num_b = mu1 * a1 * e_mu1d * (e_a1m * phi_nl - e_mu1m * phi_0);

    // Case C: queued only at system 2; Delta = T_{i-1,1} + W_{i-1,2} + 2D
    // restricted to the no-wait-at-1 event.
    const double num_c = a1 * ts_mu1 - mu1 * std::exp(-lam * (m + d)) * ts_a1 +
                         lam * e_mu1m * e_mu1d * (pw - q) +
                         q * e_mu1m * (a1 - mu1 * std::exp(-lam * d) + lam * e_mu1d);

    // Case D: no queueing; Delta = Y + S_1 + D.
    const double num_d =
        lam * mu1 * (std::exp(-lam * (m + d)) * phis_a1 - e_mu1m * e_mu1d * phi_0);

    memo_tau_ = tau;
    memo_nums_ = {num_a, num_b, num_c, num_d};
    return memo_nums_;
}

std::array<double, 4> Md1TandemPaoi::case_pdf_all(double tau) const {
    auto nums = case_numerators(tau);
    const auto p = probs_.as_array();
    for (std::size_t k = 0; k < 4; ++k) {
        nums[k] = std::max(nums[k] / p[k], 0.0);
    }
    return nums;
}

double Md1TandemPaoi::case_pdf(CaseLabel label, double tau) const {
    return case_pdf_all(tau)[static_cast<std::size_t>(label)];
}

double Md1TandemPaoi::mixture_pdf(double tau) const {
    const auto nums = case_numerators(tau);
    return std::max(nums[0] + nums[1] + nums[2] + nums[3], 0.0);
}

double paoi_pdf_md1_case(CaseLabel label, double tau, const TandemParams& params) {
    return Md1TandemPaoi(params).case_pdf(label, tau);
}

MixedDistribution paoi_distribution_md1(const TandemParams& params) {
    auto eval = std::make_shared<Md1TandemPaoi>(params);
    MixedDistribution dist;
    dist.density = [eval](double tau) { return eval->mixture_pdf(tau); };
    dist.atoms = {};
    dist.support_lower = eval->support_lower();
    return dist;
}

double single_md1_paoi_cdf(double tau, double lambda, double service_d) {
    Md1Wait wait(lambda, service_d);
    const double m = tau - 2.0 * service_d;
    if (m < 0.0 || std::isnan(tau)) return 0.0;
    const double v = -std::expm1(-lambda * (tau - service_d)) * wait.cdf(m);
    return std::clamp(v, 0.0, 1.0);
}

QuadratureSpec md1_paoi_quadrature_spec(const TandemParams& params, double abs_tol) {
    require_md1(params);
    QuadratureSpec spec;
    spec.abs_tol = abs_tol;
    spec.tail_rate = std::min(params.alpha1(), params.lambda());
    const double d = params.service_d();
    const double len = std::log(1.0 / spec.tail_residual) / spec.tail_rate;
    for (double b = 2.0 * d; b <= 2.0 * d + len; b += d) {
        spec.breakpoints.push_back(b);
    }
    return spec;
}

} // namespace paoi
