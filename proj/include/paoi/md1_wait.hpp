#pragma once

#include <span>

#include "paoi/distribution.hpp"

namespace paoi {

enum class ThetaBranch { General, BetaZero, BetaMinusLambda };

/// Branch selection for the auxiliary integral: the beta = 0 and beta = -lambda
/// points are removable singularities of the general closed form and get
/// dedicated evaluations (relative tolerance 1e-9 * lambda).
ThetaBranch theta_branch(double beta, double lambda);

/// M/D/1 waiting-time distribution (arrival rate lambda, service time D) and
/// the exponential-weighted integrals of it that the tandem PAoI formulas use.
///
/// The Erlang alternating sums lose precision once their largest term dwarfs
/// the result; evaluation switches to arbitrary-precision (MPFR) arithmetic
/// with a term-magnitude-driven precision, so results stay accurate far
/// beyond the nominal lambda*D <= 0.95, w/D <= 150 envelope. Callers that
/// care about the documented envelope can query precision_degraded().
class Md1Wait {
public:
    Md1Wait(double lambda, double service_d); // throws UnstableParamsError if lambda*D >= 1

    double lambda() const { return lambda_; }
    double service_d() const { return d_; }
    double atom() const { return atom_; } // P(W = 0) = 1 - lambda*D

    /// P(W <= w); includes the atom at zero; clamped to [0,1].
    double cdf(double w) const;
    /// Continuous part of the waiting density (w > 0); excludes the atom.
    double pdf(double w) const;

    /// e^{-max(beta,0)*M} * integral over (0,M] of P_W(v) e^{beta v} dv.
    /// The scaling keeps values bounded for positive beta.
    double phi_scaled(double M, double beta) const;

    /// Same integral for several beta values in one pass over the Erlang
    /// terms (the tandem case densities need four of them per tau).
    void phi_scaled_many(double M, std::span<const double> betas, std::span<double> out) const;

    /// e^{-max(beta,0)*M} * integral over (0,M] of p_W(v) e^{beta v} dv, where
    /// p_W is the continuous density only; the atom is never included.
    double theta_scaled(double M, double beta) const;

    /// Unscaled auxiliary integral; overflows for large beta*M, intended for
    /// moderate arguments.
    double theta(double M, double beta) const;

    /// True outside the documented precision envelope (lambda*D <= 0.95 and
    /// w/D <= 150). Values are still computed accurately via MPFR.
    bool precision_degraded(double w) const;

private:
    double cdf_raw(double w) const;

    double lambda_;
    double d_;
    double atom_;
};

/// Waiting-time CDF of an M/D/1 queue (Theorem-level closed form).
double md1_wait_cdf(double w, double lambda, double service_d);

/// Waiting-time distribution as density + atom at zero.
MixedDistribution md1_wait_distribution(double lambda, double service_d);

/// Auxiliary integral of the continuous waiting density against e^{beta w}.
double theta(double M, double beta, double lambda, double service_d);

} // namespace paoi
