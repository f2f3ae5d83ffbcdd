#include "doctest.h"

#include <cmath>
#include <vector>

#include "paoi/numerics.hpp"

using namespace paoi;

namespace {

MixedDistribution unit_exponential(double rate) {
    MixedDistribution d;
    d.density = [rate](double t) { return t < 0.0 ? 0.0 : rate * std::exp(-rate * t); };
    d.support_lower = 0.0;
    return d;
}

} // namespace

TEST_CASE("adaptive integration hits analytic values") {
    const double v = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12);
    CHECK(v == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(integrate_adaptive([](double) { return 1.0; }, 3.0, 3.0, 1e-12) == 0.0);
}

TEST_CASE("cdf_from_density on exponential") {
    auto d = unit_exponential(1.5);
    QuadratureSpec spec;
    spec.tail_rate = 1.5;
    CHECK(cdf_from_density(d, -1.0, spec) == 0.0);
    CHECK(cdf_from_density(d, 1.0, spec) == doctest::Approx(1.0 - std::exp(-1.5)).epsilon(1e-9));
    CHECK(cdf_from_density(d, 60.0, spec) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("cdf handles atoms and support offsets") {
    // half the mass in an atom at 2, half exponential above it
    MixedDistribution d;
    d.support_lower = 2.0;
    d.atoms = {{2.0, 0.5}};
    d.density = [](double t) { return t < 2.0 ? 0.0 : 0.25 * std::exp(-0.5 * (t - 2.0)); };
    QuadratureSpec spec;
    spec.tail_rate = 0.5;
    CHECK(cdf_from_density(d, 1.0, spec) == 0.0);
    CHECK(cdf_from_density(d, 2.0, spec) == doctest::Approx(0.5));
    CHECK(cdf_from_density(d, 1e3, spec) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(mean(d, spec) == doctest::Approx(2.0 * 0.5 + 0.5 * 4.0).epsilon(1e-6));
}

TEST_CASE("quantile round trips") {
    auto d = unit_exponential(0.7);
    QuadratureSpec spec;
    spec.tail_rate = 0.7;
    for (double p : {0.01, 0.25, 0.5, 0.9, 0.99, 0.999}) {
        const double x = quantile(d, p, spec);
        CHECK(x == doctest::Approx(-std::log(1.0 - p) / 0.7).epsilon(1e-5));
        CHECK(cdf_from_density(d, x, spec) == doctest::Approx(p).epsilon(1e-6));
    }
    CHECK(quantile(d, 1e-9, spec) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("quantile bracket failure on truncated mass") {
    // density integrating to ~0.5: p=0.9 is unreachable
    MixedDistribution d;
    d.density = [](double t) { return (t >= 0.0 && t <= 1.0) ? 0.5 : 0.0; };
    d.support_lower = 0.0;
    QuadratureSpec spec;
    spec.tail_rate = 1.0;
    spec.breakpoints = {1.0}; // the density jump must be a declared kink
    CHECK_THROWS_AS(quantile(d, 0.9, spec), BracketError);
}

TEST_CASE("empirical distribution basics") {
    EmpiricalDistribution emp({3.0, 1.0, 2.0, 4.0});
    CHECK(emp.ecdf(2.5) == doctest::Approx(0.5));
    CHECK(emp.ecdf(4.0) == doctest::Approx(1.0));
    CHECK(emp.ecdf(0.5) == 0.0);
    CHECK(emp.quantile(0.5) == 2.0);
    CHECK(emp.quantile(1.0) == 4.0);
    CHECK(emp.mean() == doctest::Approx(2.5));
    CHECK_THROWS_AS(EmpiricalDistribution({}), std::invalid_argument);
}

TEST_CASE("ks distance against exact inverse-CDF samples") {
    // samples exactly at F^{-1}((i-0.5)/n) for F = 1-e^{-x}: KS = 0.5/n
    const int n = 1000;
    std::vector<double> xs;
    xs.reserve(n);
    for (int i = 1; i <= n; ++i) {
        xs.push_back(-std::log(1.0 - (i - 0.5) / n));
    }
    EmpiricalDistribution emp(std::move(xs));
    const double d = ks_distance([](double x) { return 1.0 - std::exp(-x); }, emp);
    CHECK(d == doctest::Approx(0.5 / n).epsilon(1e-6));

    // disjoint supports: distance ~ 1
    EmpiricalDistribution far({100.0, 101.0, 102.0});
    const double d2 = ks_distance([](double x) { return std::min(x / 1.0, 1.0); }, far);
    CHECK(d2 == doctest::Approx(1.0));
}

TEST_CASE("ks distance with an atom and ties") {
    // distribution: mass 0.6 at 0, exp(1) above; sample ties at zero
    std::vector<double> xs;
    for (int i = 0; i < 600; ++i) xs.push_back(0.0);
    for (int i = 1; i <= 400; ++i) xs.push_back(-std::log(1.0 - (i - 0.5) / 400.0));
    EmpiricalDistribution emp(std::move(xs));
    auto cdf = [](double x) { return x < 0.0 ? 0.0 : 0.6 + 0.4 * (1.0 - std::exp(-x)); };
    const double d = ks_distance(cdf, emp, {{0.0, 0.6}});
    CHECK(d < 0.002); // would be ~0.6 without atom-aware tie handling
}

TEST_CASE("binomial z-score") {
    CHECK(binomial_z(500, 1000, 0.5) == doctest::Approx(0.0));
    CHECK(binomial_z(600, 1000, 0.5) == doctest::Approx(100.0 / (std::sqrt(0.25 / 1000.0) * 1000.0)));
}
