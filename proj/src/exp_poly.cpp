#include "paoi/exp_poly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace paoi {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double binom(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

} // namespace

ExpPoly::ExpPoly(std::vector<ExpPolyTerm> terms) : terms_(std::move(terms)) { compact(); }

ExpPoly ExpPoly::exponential(double rate) {
    if (!(rate > 0.0)) {
        throw std::invalid_argument("exponential rate must be positive");
    }
    return ExpPoly({{rate, 0, rate}});
}

void ExpPoly::compact() {
    std::map<std::pair<int, double>, double> acc;
    for (const auto& t : terms_) {
        if (t.rate <= 0.0) {
            throw std::invalid_argument("exp-poly rates must be positive");
        }
        acc[{t.power, t.rate}] += t.coef;
    }
    terms_.clear();
    for (const auto& [key, coef] : acc) {
        if (coef != 0.0) {
            terms_.push_back({coef, key.first, key.second});
        }
    }
}

double ExpPoly::value(double t) const {
    if (t < 0.0) return 0.0;
    double acc = 0.0;
    for (const auto& term : terms_) {
        double p = term.coef * std::exp(-term.rate * t);
        for (int i = 0; i < term.power; ++i) p *= t;
        acc += p;
    }
    return acc;
}

double ExpPoly::integral() const {
    double acc = 0.0;
    for (const auto& t : terms_) {
        acc += t.coef * factorial(t.power) / std::pow(t.rate, t.power + 1);
    }
    return acc;
}

double ExpPoly::mean() const {
    double acc = 0.0;
    for (const auto& t : terms_) {
        acc += t.coef * factorial(t.power + 1) / std::pow(t.rate, t.power + 2);
    }
    return acc;
}

double gamma_p_int(int n, double x) {
    if (x <= 0.0) return 0.0;
    if (x < n + 40.0) {
        // lower series e^{-x} sum_{j>=n} x^j / j!
        double term = std::exp(n * std::log(x) - x - std::lgamma(n + 1.0));
        double acc = term;
        for (int j = n + 1; j < n + 400; ++j) {
            term *= x / j;
            acc += term;
            if (term < acc * 1e-17) break;
        }
        return std::min(acc, 1.0);
    }
    // complement of the finite upper sum e^{-x} sum_{j<n} x^j / j!
    double term = std::exp(-x);
    double acc = term;
    for (int j = 1; j < n; ++j) {
        term *= x / j;
        acc += term;
    }
    return std::max(0.0, 1.0 - acc);
}

double ExpPoly::cdf(double t) const {
    if (t <= 0.0) return 0.0;
    double acc = 0.0;
    for (const auto& term : terms_) {
        acc += term.coef * factorial(term.power) / std::pow(term.rate, term.power + 1) *
               gamma_p_int(term.power + 1, term.rate * t);
    }
    return acc;
}

ExpPoly ExpPoly::scaled(double s) const {
    auto terms = terms_;
    for (auto& t : terms) t.coef *= s;
    return ExpPoly(std::move(terms));
}

ExpPoly ExpPoly::tilted(double extra_rate) const {
    auto terms = terms_;
    for (auto& t : terms) t.rate += extra_rate;
    return ExpPoly(std::move(terms));
}

ExpPoly ExpPoly::operator+(const ExpPoly& other) const {
    auto terms = terms_;
    terms.insert(terms.end(), other.terms_.begin(), other.terms_.end());
    return ExpPoly(std::move(terms));
}

ExpPoly ExpPoly::convolve(const ExpPoly& other, double merge_tol) const {
    std::vector<ExpPolyTerm> out;
    for (const auto& ta : terms_) {
        for (const auto& tb : other.terms_) {
            const double c = ta.coef * tb.coef;
            const int m = ta.power;
            const int n = tb.power;
            const double a = ta.rate;
            const double b = tb.rate;
            if (std::abs(a - b) <= merge_tol) {
                // confluent limit: t^{m+n+1} e^{-rt} m! n! / (m+n+1)!
                const double r = 0.5 * (a + b);
                out.push_back({c * factorial(m) * factorial(n) / factorial(m + n + 1),
                               m + n + 1, r});
                continue;
            }
            // t^m e^{-at} * t^n e^{-bt}
            // = e^{-b tau} sum_k C(n,k)(-1)^k tau^{n-k} int_0^tau s^{m+k} e^{-(a-b)s} ds
            const double cc = a - b;
            for (int k = 0; k <= n; ++k) {
                const double pref = c * binom(n, k) * ((k % 2 == 0) ? 1.0 : -1.0);
                const int p = m + k;
                const double fp = factorial(p);
                out.push_back({pref * fp / std::pow(cc, p + 1), n - k, b});
                for (int q = 0; q <= p; ++q) {
                    out.push_back({-pref * fp / factorial(q) / std::pow(cc, p - q + 1),
                                   n - k + q, a});
                }
            }
        }
    }
    return ExpPoly(std::move(out));
}

} // namespace paoi
