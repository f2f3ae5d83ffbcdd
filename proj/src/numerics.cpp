#include "paoi/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace paoi {

namespace {

struct SimpsonFrame {
    double a, b, fa, fm, fb, whole;
    double tol;
    int depth;
};

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

} // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
    if (!(b > a)) {
        return 0.0;
    }
    // Sample the outer endpoints a hair inside the interval: panel boundaries
    // sit exactly on declared kinks, and the one-sided limit is the value that
    // belongs to this panel.
    const double nudge = (b - a) * 1e-12;
    const double m0 = 0.5 * (a + b);
    std::vector<SimpsonFrame> stack;
    stack.push_back(
        {a, b, f(a + nudge), f(m0), f(b - nudge), 0.0, std::max(abs_tol, 1e-300), max_depth});
    stack.back().whole = simpson(a, b, stack.back().fa, stack.back().fm, stack.back().fb);

    double total = 0.0;
    double comp = 0.0; // Kahan carry
    while (!stack.empty()) {
        SimpsonFrame fr = stack.back();
        stack.pop_back();
        const double m = 0.5 * (fr.a + fr.b);
        const double lm = 0.5 * (fr.a + m);
        const double rm = 0.5 * (m + fr.b);
        const double flm = f(lm);
        const double frm = f(rm);
        const double left = simpson(fr.a, m, fr.fa, flm, fr.fm);
        const double right = simpson(m, fr.b, fr.fm, frm, fr.fb);
        const double err = left + right - fr.whole;
        if (std::abs(err) <= 15.0 * fr.tol || fr.depth <= 0) {
            if (fr.depth <= 0 && std::abs(err) > 15.0 * fr.tol) {
                throw QuadratureError("adaptive quadrature did not converge");
            }
            const double piece = left + right + err / 15.0;
            const double y = piece - comp;
            const double t = total + y;
            comp = (t - total) - y;
            total = t;
        } else {
            stack.push_back({fr.a, m, fr.fa, flm, fr.fm, left, 0.5 * fr.tol, fr.depth - 1});
            stack.push_back({m, fr.b, fr.fm, frm, fr.fb, right, 0.5 * fr.tol, fr.depth - 1});
        }
    }
    return total;
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples)
    : samples_(std::move(samples)) {
    if (samples_.empty()) {
        throw std::invalid_argument("empirical distribution needs at least one sample");
    }
    std::sort(samples_.begin(), samples_.end());
}

double EmpiricalDistribution::mean() const {
    double acc = 0.0;
    for (double v : samples_) acc += v;
    return acc / static_cast<double>(samples_.size());
}

double EmpiricalDistribution::ecdf(double x) const {
    auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
    return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
}

double EmpiricalDistribution::quantile(double p) const {
    if (!(p > 0.0) || p > 1.0) {
        throw std::invalid_argument("quantile requires p in (0,1]");
    }
    const auto n = samples_.size();
    auto idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    idx = std::min(std::max<std::size_t>(idx, 1), n);
    return samples_[idx - 1];
}

CdfEvaluator::CdfEvaluator(const MixedDistribution& dist, const QuadratureSpec& spec)
    : dist_(&dist), spec_(spec) {
    if (!(spec_.tail_rate > 0.0)) {
        throw std::invalid_argument("tail_rate must be positive");
    }
    if (!(spec_.abs_tol > 0.0)) {
        throw std::invalid_argument("abs_tol must be positive");
    }
    const double lower = dist.support_lower;
    const double tail_len = std::log(1.0 / spec_.tail_residual) / spec_.tail_rate;
    const double upper = lower + std::max(tail_len, 1e-6);

    // Panel boundaries: forced breakpoints plus a width-ramp that keeps early
    // panels (where the density has structure) short and lets tail panels grow.
    std::vector<double> nodes;
    nodes.push_back(lower);
    const double w_cap = 0.5 / spec_.tail_rate;
    double w = std::min(w_cap, std::max((upper - lower) / 256.0, 1e-9));
    double x = lower;
    while (x < upper) {
        x = std::min(x + w, upper);
        nodes.push_back(x);
        w = std::min(w * 1.2, w_cap);
    }
    for (double bp : spec_.breakpoints) {
        if (bp > lower && bp < upper) {
            nodes.push_back(bp);
        }
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                nodes.end());
    nodes_ = std::move(nodes);

    prefix_.assign(nodes_.size(), 0.0);
    const double total_width = nodes_.back() - nodes_.front();
    double acc = 0.0, comp = 0.0;
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        // width-proportional error budget: wide tail panels get the slack
        const double tol = spec_.abs_tol * (nodes_[i] - nodes_[i - 1]) / total_width;
        const double piece =
            integrate_adaptive(dist_->density, nodes_[i - 1], nodes_[i], tol, spec_.max_depth);
        const double y = piece - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        prefix_[i] = acc;
    }
}

double CdfEvaluator::atom_mass_below(double tau) const {
    double m = 0.0;
    for (const auto& a : dist_->atoms) {
        if (a.location <= tau) m += a.mass;
    }
    return m;
}

double CdfEvaluator::continuous_cdf(double tau) const {
    if (tau <= nodes_.front()) return 0.0;
    if (tau >= nodes_.back()) return prefix_.back();
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), tau);
    const auto i = static_cast<std::size_t>(it - nodes_.begin()); // nodes_[i-1] <= tau < nodes_[i]
    const double partial = integrate_adaptive(dist_->density, nodes_[i - 1], tau,
                                              0.1 * spec_.abs_tol, spec_.max_depth);
    return prefix_[i - 1] + partial;
}

double CdfEvaluator::cdf(double tau) const {
    const double v = continuous_cdf(tau) + atom_mass_below(tau);
    return std::clamp(v, 0.0, 1.0);
}

std::vector<double> CdfEvaluator::cdf_many(std::span<const double> sorted_taus) const {
    std::vector<double> out;
    out.reserve(sorted_taus.size());
    const double h_max = 0.1 / spec_.tail_rate;
    double acc = 0.0, comp = 0.0;
    double pos = nodes_.front();
    auto advance_to = [&](double to) {
        if (to <= pos) return;
        // composite Simpson in chunks, splitting at panel nodes to respect kinks
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), pos);
        while (pos < to) {
            double stop = to;
            if (it != nodes_.end() && *it < stop) stop = *it;
            const int nsub = std::max(1, static_cast<int>(std::ceil((stop - pos) / h_max)));
            const double h = (stop - pos) / nsub;
            for (int k = 0; k < nsub; ++k) {
                const double a = pos + k * h;
                const double b = (k == nsub - 1) ? stop : a + h;
                const double piece = simpson(a, b, dist_->density(a),
                                             dist_->density(0.5 * (a + b)), dist_->density(b));
                const double y = piece - comp;
                const double t = acc + y;
                comp = (t - acc) - y;
                acc = t;
            }
            pos = stop;
            if (it != nodes_.end() && *it <= pos) ++it;
        }
    };
    for (double tau : sorted_taus) {
        if (tau > pos) advance_to(std::min(tau, nodes_.back()));
        out.push_back(std::clamp(acc + atom_mass_below(tau), 0.0, 1.0));
    }
    return out;
}

double CdfEvaluator::total_mass() const {
    double m = prefix_.back();
    for (const auto& a : dist_->atoms) m += a.mass;
    return m;
}

double CdfEvaluator::quantile(double p) const {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument("quantile requires p in (0,1)");
    }
    if (cdf(nodes_.back()) < p) {
        throw BracketError("tail-rate based upper bound never reaches requested probability");
    }
    double lo = nodes_.front();
    double hi = nodes_.back();
    double flo = cdf(lo);
    if (flo >= p) return lo; // p inside an atom at the support edge
    // Bisection; the cdf is monotone so this always lands.
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double fm = cdf(mid);
        if (std::abs(fm - p) < 1e-8) return mid;
        if (hi - lo < 1e-10) return mid;
        if (fm < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double CdfEvaluator::mean() const {
    const auto& f = dist_->density;
    double acc = 0.0;
    const double total_width = nodes_.back() - nodes_.front();
    // the integrand carries an extra factor of tau, so scale the budget with it
    const double scale = std::max(1.0, std::abs(nodes_.back()));
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        const double tol = scale * spec_.abs_tol * (nodes_[i] - nodes_[i - 1]) / total_width;
        acc += integrate_adaptive([&f](double t) { return t * f(t); }, nodes_[i - 1], nodes_[i],
                                  tol, spec_.max_depth);
    }
    for (const auto& a : dist_->atoms) acc += a.location * a.mass;
    return acc;
}

double cdf_from_density(const MixedDistribution& dist, double tau, const QuadratureSpec& spec) {
    if (!std::isfinite(tau)) {
        throw std::invalid_argument("tau must be finite");
    }
    double v = 0.0;
    if (tau > dist.support_lower) {
        std::vector<double> cuts;
        cuts.push_back(dist.support_lower);
        for (double bp : spec.breakpoints) {
            if (bp > dist.support_lower && bp < tau) cuts.push_back(bp);
        }
        cuts.push_back(tau);
        std::sort(cuts.begin(), cuts.end());
        const double tol = spec.abs_tol / static_cast<double>(cuts.size());
        for (std::size_t i = 1; i < cuts.size(); ++i) {
            v += integrate_adaptive(dist.density, cuts[i - 1], cuts[i], tol, spec.max_depth);
        }
    }
    for (const auto& a : dist.atoms) {
        if (a.location <= tau) v += a.mass;
    }
    return std::clamp(v, 0.0, 1.0);
}

double quantile(const MixedDistribution& dist, double p, const QuadratureSpec& spec) {
    QuadratureSpec s = spec;
    s.tail_residual = std::min(spec.tail_residual, (1.0 - p) * 1e-3);
    CdfEvaluator eval(dist, s);
    return eval.quantile(p);
}

double mean(const MixedDistribution& dist, const QuadratureSpec& spec) {
    CdfEvaluator eval(dist, spec);
    return eval.mean();
}

double ks_distance_from_values(std::span<const double> cdf_at_samples,
                               const EmpiricalDistribution& emp,
                               const std::vector<PointMass>& atoms) {
    const auto& xs = emp.samples();
    const double n = static_cast<double>(xs.size());
    if (cdf_at_samples.size() != xs.size()) {
        throw std::invalid_argument("cdf values misaligned with samples");
    }
    auto atom_at = [&atoms](double x) {
        double m = 0.0;
        for (const auto& a : atoms) {
            if (a.location == x) m += a.mass;
        }
        return m;
    };
    double d = 0.0;
    std::size_t i = 0;
    while (i < xs.size()) {
        std::size_t j = i;
        while (j < xs.size() && xs[j] == xs[i]) ++j;
        const double F = cdf_at_samples[i];
        const double F_left = F - atom_at(xs[i]);
        d = std::max(d, std::abs(F - static_cast<double>(j) / n));
        d = std::max(d, std::abs(F_left - static_cast<double>(i) / n));
        i = j;
    }
    return d;
}

double ks_distance(const std::function<double(double)>& cdf, const EmpiricalDistribution& emp,
                   const std::vector<PointMass>& atoms) {
    std::vector<double> vals;
    vals.reserve(emp.n());
    double prev = std::numeric_limits<double>::quiet_NaN();
    double prev_val = 0.0;
    for (double x : emp.samples()) {
        if (x == prev) {
            vals.push_back(prev_val);
        } else {
            prev = x;
            prev_val = cdf(x);
            vals.push_back(prev_val);
        }
    }
    return ks_distance_from_values(vals, emp, atoms);
}

double binomial_z(std::size_t count, std::size_t n, double p) {
    const double nn = static_cast<double>(n);
    const double freq = static_cast<double>(count) / nn;
    const double sigma = std::sqrt(p * (1.0 - p) / nn);
    return (freq - p) / sigma;
}

} // namespace paoi
