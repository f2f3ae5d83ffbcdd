#include "paoi/md1_wait.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "bigfloat.hpp"
#include "paoi/core.hpp"

namespace paoi {

using detail::BigFloat;
using detail::PrecisionGuard;
using detail::to_double;

namespace detail {
thread_local mpfr_prec_t BigFloat::working_prec = 128;
} // namespace detail

namespace {

// Largest term magnitude the plain-double accumulation is allowed before the
// evaluation reruns in MPFR (keeps the cancellation error below ~1e-10).
constexpr double kDoublePathMaxLog = 11.5; // ln(1e5)

int term_count(double w, double d) { return static_cast<int>(std::floor(w / d)); }

struct ErlangScan {
    double max_log; // log of the largest term k ln(lam Vk) + lam Vk - ln k!
    int k_eff;      // terms beyond this are < e^{-80} absolute, negligible
};

ErlangScan erlang_scan(double lambda, double d, double w, int K) {
    double best = lambda * w; // k = 0
    int k_eff = K;
    bool past_peak = false;
    for (int k = 1; k <= K; ++k) {
        const double vk = w - k * d;
        if (vk <= 0.0) {
            k_eff = k - 1;
            break;
        }
        const double lv = lambda * vk;
        const double lg = k * std::log(lv) + lv - std::lgamma(k + 1.0);
        if (lg > best) {
            best = lg;
        } else {
            past_peak = true;
        }
        if (past_peak && lg < -80.0) {
            k_eff = k; // the factorial decay has taken over for good
            break;
        }
    }
    return {best, k_eff};
}

mpfr_prec_t precision_for(double max_log) {
    const double bits = 96.0 + std::max(0.0, max_log) * 1.4427;
    return static_cast<mpfr_prec_t>(std::min(bits, 1.6e4));
}

// ---- templated sum kernels (Real = double fast path, BigFloat fallback) ----

template <class Real>
Real sum_pw_cdf(double lambda, double d, double w, int K) {
    const Real lam(lambda), dd(d), ww(w);
    Real acc(0.0);
    for (int k = 0; k <= K; ++k) {
        Real vk = ww - Real(static_cast<double>(k)) * dd;
        Real coef(1.0);
        const Real x = -(lam * vk);
        for (int j = 1; j <= k; ++j) {
            coef = coef * x / Real(static_cast<double>(j));
        }
        acc += coef * exp(lam * vk);
    }
    return acc;
}

template <class Real>
Real sum_pw_pdf(double lambda, double d, double w, int K) {
    const Real lam(lambda), dd(d), ww(w);
    Real acc = lam * exp(lam * ww);
    for (int k = 1; k <= K; ++k) {
        Real vk = ww - Real(static_cast<double>(k)) * dd;
        const Real lv = lam * vk;
        // (-lam)^k vk^{k-1} / k! * (k + lam vk) * e^{lam vk}
        Real coef = -lam;
        for (int j = 2; j <= k; ++j) {
            coef = coef * (-(lam * vk)) / Real(static_cast<double>(j));
        }
        acc += coef * (Real(static_cast<double>(k)) + lv) * exp(lv);
    }
    return acc;
}

/// e^{-gamma V} * integral_0^V v^k e^{gamma v} dv  (nonnegative, bounded).
template <class Real>
Real itilde(int k, const Real& V, const Real& gamma, double gamma_d, double v_d) {
    if (v_d <= 0.0) return Real(0.0);
    if (std::abs(gamma_d * v_d) < 0.5) {
        // series: V^{k+1} e^{-gV} sum_m (gV)^m / (m! (k+m+1))
        const Real gv = gamma * V;
        Real pw(1.0);
        Real acc = Real(1.0) / Real(static_cast<double>(k + 1));
        for (int m = 1; m <= 48; ++m) {
            pw = pw * gv / Real(static_cast<double>(m));
            acc += pw / Real(static_cast<double>(k + m + 1));
        }
        Real vpow(1.0);
        for (int j = 0; j <= k; ++j) vpow *= V;
        return vpow * exp(-gv) * acc;
    }
    // recurrence J_j = (V^j - j J_{j-1}) / gamma, J_0 = (1 - e^{-gV})/gamma
    Real J = (Real(1.0) - exp(-(gamma * V))) / gamma;
    Real vpow(1.0);
    for (int j = 1; j <= k; ++j) {
        vpow *= V;
        J = (vpow - Real(static_cast<double>(j)) * J) / gamma;
    }
    return J;
}

/// e^{min(beta,0) M} * sum_k (-lam)^k/k! e^{lam Vk} Itilde_k(Vk, lam+beta) for
/// a batch of betas sharing one pass over the Erlang terms; multiplied by the
/// atom outside, these are the scaled Phi integrals.
template <class Real>
void sum_phi_scaled_many(double lambda, double d, double M, std::span<const double> betas,
                         std::span<double> out, int K, double atom) {
    const Real lam(lambda), dd(d), mm(M);
    const std::size_t nb = betas.size();
    std::vector<Real> gammas;
    std::vector<Real> accs;
    gammas.reserve(nb);
    accs.reserve(nb);
    for (double beta : betas) {
        gammas.push_back(lam + Real(beta));
        accs.emplace_back(0.0);
    }
    Real coef(1.0); // (-lam)^k / k!, updated incrementally
    for (int k = 0; k <= K; ++k) {
        if (k > 0) coef = coef * (-lam) / Real(static_cast<double>(k));
        const double vk_d = M - k * d;
        if (vk_d <= 0.0) break;
        Real vk = mm - Real(static_cast<double>(k)) * dd;
        const Real base = coef * exp(lam * vk);
        for (std::size_t b = 0; b < nb; ++b) {
            accs[b] += base * itilde(k, vk, gammas[b], lambda + betas[b], vk_d);
        }
    }
    for (std::size_t b = 0; b < nb; ++b) {
        if (betas[b] < 0.0) {
            accs[b] *= exp(Real(betas[b]) * mm);
        }
        out[b] = to_double(Real(atom) * accs[b]);
    }
}

} // namespace

ThetaBranch theta_branch(double beta, double lambda) {
    const double tol = 1e-9 * lambda;
    if (std::abs(beta) <= tol) return ThetaBranch::BetaZero;
    if (std::abs(beta + lambda) <= tol) return ThetaBranch::BetaMinusLambda;
    return ThetaBranch::General;
}

Md1Wait::Md1Wait(double lambda, double service_d) : lambda_(lambda), d_(service_d) {
    if (!(lambda > 0.0) || !(service_d > 0.0) || !std::isfinite(lambda) ||
        !std::isfinite(service_d)) {
        throw std::invalid_argument("lambda and D must be positive and finite");
    }
    if (!(lambda * service_d < 1.0)) {
        throw UnstableParamsError("M/D/1 requires lambda * D < 1");
    }
    atom_ = 1.0 - lambda * service_d;
}

bool Md1Wait::precision_degraded(double w) const {
    return lambda_ * d_ > 0.95 || w / d_ > 150.0;
}

double Md1Wait::cdf_raw(double w) const {
    const auto scan = erlang_scan(lambda_, d_, w, term_count(w, d_));
    if (scan.max_log <= kDoublePathMaxLog) {
        return atom_ * sum_pw_cdf<double>(lambda_, d_, w, scan.k_eff);
    }
    PrecisionGuard guard(precision_for(scan.max_log));
    return atom_ * sum_pw_cdf<BigFloat>(lambda_, d_, w, scan.k_eff).to_double();
}

double Md1Wait::cdf(double w) const {
    if (w < 0.0 || std::isnan(w)) return 0.0;
    return std::clamp(cdf_raw(w), 0.0, 1.0);
}

double Md1Wait::pdf(double w) const {
    if (w <= 0.0 || std::isnan(w)) return 0.0;
    const auto scan = erlang_scan(lambda_, d_, w, term_count(w, d_));
    double v;
    if (scan.max_log <= kDoublePathMaxLog) {
        v = atom_ * sum_pw_pdf<double>(lambda_, d_, w, scan.k_eff);
    } else {
        PrecisionGuard guard(precision_for(scan.max_log));
        v = atom_ * sum_pw_pdf<BigFloat>(lambda_, d_, w, scan.k_eff).to_double();
    }
    return std::max(v, 0.0);
}

void Md1Wait::phi_scaled_many(double M, std::span<const double> betas,
                              std::span<double> out) const {
    if (betas.size() != out.size()) {
        throw std::invalid_argument("phi_scaled_many: size mismatch");
    }
    if (!(M > 0.0)) {
        for (auto& v : out) v = 0.0;
        return;
    }
    const auto scan = erlang_scan(lambda_, d_, M, term_count(M, d_));
    double max_log = 0.0;
    for (double beta : betas) {
        const double gamma = lambda_ + beta;
        // Term bound: the Phi terms carry an extra Itilde factor bounded by
        // min(V, 1/gamma) (gamma > 0) or V; fold it into the estimate.
        const double extent = (gamma > 0.0) ? std::min(M, 1.0 / gamma) : M;
        double lg = scan.max_log + std::max(0.0, std::log(extent));
        if (gamma != 0.0 && std::abs(gamma) < lambda_) {
            lg += scan.k_eff * std::log(lambda_ / std::abs(gamma)); // recurrence amplification
        }
        max_log = std::max(max_log, lg);
    }
    if (max_log <= kDoublePathMaxLog) {
        sum_phi_scaled_many<double>(lambda_, d_, M, betas, out, scan.k_eff, atom_);
        return;
    }
    PrecisionGuard guard(precision_for(max_log));
    sum_phi_scaled_many<BigFloat>(lambda_, d_, M, betas, out, scan.k_eff, atom_);
}

double Md1Wait::phi_scaled(double M, double beta) const {
    double out = 0.0;
    phi_scaled_many(M, {&beta, 1}, {&out, 1});
    return out;
}

double Md1Wait::theta_scaled(double M, double beta) const {
    if (!(M > 0.0)) return 0.0;
    switch (theta_branch(beta, lambda_)) {
    case ThetaBranch::BetaZero:
        return cdf(M) - atom_;
    case ThetaBranch::BetaMinusLambda:
        // theta(M,-lam) = e^{-lam M} P_W(M) - atom + lam Phi(M,-lam)
        return std::exp(-lambda_ * M) * cdf(M) - atom_ + lambda_ * phi_scaled(M, -lambda_);
    case ThetaBranch::General:
        break;
    }
    if (beta > 0.0) {
        return cdf(M) - atom_ * std::exp(-beta * M) - beta * phi_scaled(M, beta);
    }
    return std::exp(beta * M) * cdf(M) - atom_ - beta * phi_scaled(M, beta);
}

double Md1Wait::theta(double M, double beta) const {
    if (!(M > 0.0)) return 0.0;
    const double scale = std::max(beta, 0.0) * M;
    return std::exp(scale) * theta_scaled(M, beta);
}

double md1_wait_cdf(double w, double lambda, double service_d) {
    return Md1Wait(lambda, service_d).cdf(w);
}

MixedDistribution md1_wait_distribution(double lambda, double service_d) {
    auto wait = std::make_shared<Md1Wait>(lambda, service_d);
    MixedDistribution dist;
    dist.density = [wait](double w) { return wait->pdf(w); };
    dist.atoms = {{0.0, wait->atom()}};
    dist.support_lower = 0.0;
    return dist;
}

double theta(double M, double beta, double lambda, double service_d) {
    return Md1Wait(lambda, service_d).theta(M, beta);
}

} // namespace paoi
