#pragma once

#include <vector>

namespace paoi {

/// One term coef * t^power * e^{-rate t} on t >= 0.
struct ExpPolyTerm {
    double coef;
    int power;
    double rate;
};

/// Finite sum of exponential-polynomial terms, closed under convolution.
/// This family contains every density arising from sums of independent
/// exponentials (including tilted/conditioned ones), so the M/M/1 tandem
/// case densities are built mechanically from their factor distributions.
///
/// Convolving two terms whose rates differ by at most merge_tol treats them
/// as confluent and produces the exact equal-rate limit (a higher t-power)
/// instead of a 1/(rate gap) cancellation.
class ExpPoly {
public:
    ExpPoly() = default;
    explicit ExpPoly(std::vector<ExpPolyTerm> terms);

    static ExpPoly exponential(double rate); // the density rate * e^{-rate t}

    const std::vector<ExpPolyTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    double value(double t) const;
    double integral() const; // over [0, inf)
    double mean() const;     // int_0^inf t f(t) dt
    double cdf(double t) const;

    ExpPoly convolve(const ExpPoly& other, double merge_tol) const;
    ExpPoly scaled(double s) const;
    /// Multiplies by e^{-extra_rate t} (used for conditioning tilts).
    ExpPoly tilted(double extra_rate) const;
    ExpPoly operator+(const ExpPoly& other) const;

private:
    void compact();

    std::vector<ExpPolyTerm> terms_;
};

/// Regularized lower incomplete gamma P(n, x) for integer n >= 1.
double gamma_p_int(int n, double x);

} // namespace paoi
