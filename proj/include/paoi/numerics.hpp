#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "paoi/distribution.hpp"

namespace paoi {

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Controls the quadrature used to turn densities into CDFs/quantiles/means.
/// tail_rate is an exponential lower bound on the decay of the density, used
/// to pick the upper truncation point; breakpoints force panel boundaries at
/// known kinks of the integrand.
struct QuadratureSpec {
    double abs_tol = 1e-9;
    std::vector<double> breakpoints;
    double tail_rate = 1.0;
    double tail_residual = 1e-10;
    int max_depth = 48;
};

/// Adaptive Simpson integration; throws QuadratureError if the tolerance is
/// not met within max_depth bisections.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth = 48);

/// Sorted-sample empirical distribution with type-1 (inverse ECDF) quantiles.
class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(std::vector<double> samples); // throws on empty input

    const std::vector<double>& samples() const { return samples_; }
    std::size_t n() const { return samples_.size(); }
    double min() const { return samples_.front(); }
    double max() const { return samples_.back(); }
    double mean() const;

    /// Right-continuous ECDF: fraction of samples <= x.
    double ecdf(double x) const;
    /// Type-1 inverse: smallest sample x with ECDF(x) >= p, p in (0,1].
    double quantile(double p) const;

private:
    std::vector<double> samples_;
};

/// Cached cumulative quadrature of a MixedDistribution. Builds a panel table
/// once over [support_lower, upper truncation]; cdf/quantile/mean reuse it.
class CdfEvaluator {
public:
    CdfEvaluator(const MixedDistribution& dist, const QuadratureSpec& spec);

    double cdf(double tau) const;
    /// CDF at many nondecreasing points in one sweep (used for KS checks).
    std::vector<double> cdf_many(std::span<const double> sorted_taus) const;
    double quantile(double p) const; // throws BracketError if p unreachable
    double total_mass() const;       // integral over the whole table + atoms
    double mean() const;
    double upper_bound() const { return nodes_.back(); }

private:
    double continuous_cdf(double tau) const;
    double atom_mass_below(double tau) const;
    double panel_partial(std::size_t panel, double to) const;

    const MixedDistribution* dist_;
    QuadratureSpec spec_;
    std::vector<double> nodes_;  // panel boundaries, nodes_[0] = support_lower
    std::vector<double> prefix_; // prefix_[i] = integral of density over [nodes_0, nodes_i]
};

/// P(X <= tau) by quadrature of the density up to tau plus atoms at or below tau.
double cdf_from_density(const MixedDistribution& dist, double tau, const QuadratureSpec& spec);

/// Inverse CDF by bisection to |cdf - p| < 1e-8 or interval width < 1e-10.
double quantile(const MixedDistribution& dist, double p, const QuadratureSpec& spec);

/// First moment by quadrature with exponential tail truncation.
double mean(const MixedDistribution& dist, const QuadratureSpec& spec);

/// Kolmogorov-Smirnov distance between an analytic CDF and an ECDF, evaluated
/// at the sample points (both one-sided gaps). Ties are grouped; `atoms` lets
/// the left limit of a mixed analytic CDF be formed at atom locations.
double ks_distance(const std::function<double(double)>& cdf, const EmpiricalDistribution& emp,
                   const std::vector<PointMass>& atoms = {});

/// Same statistic from precomputed CDF values aligned with emp.samples().
double ks_distance_from_values(std::span<const double> cdf_at_samples,
                               const EmpiricalDistribution& emp,
                               const std::vector<PointMass>& atoms = {});

/// z-score of an observed count against Binomial(n, p).
double binomial_z(std::size_t count, std::size_t n, double p);

} // namespace paoi
