#include "exitmoments/errors.hpp"
#include "exitmoments/numerics.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

using namespace exitmoments;

TEST_CASE("log_gamma matches factorials and half-integers") {
    CHECK(numerics::gamma(5.0) == doctest::Approx(24.0).epsilon(1e-14));
    CHECK(numerics::gamma(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
    CHECK(numerics::log_gamma(0.25) == doctest::Approx(std::lgamma(0.25)).epsilon(1e-14));
    CHECK(numerics::log_factorial(200) == doctest::Approx(std::lgamma(201.0)).epsilon(1e-14));
    CHECK_THROWS_AS(numerics::log_gamma(0.0), InvalidInput);
}

TEST_CASE("unit sphere measures") {
    CHECK(numerics::unit_sphere_measure(1) == 2.0);
    CHECK(numerics::unit_sphere_measure(2) == doctest::Approx(2 * std::numbers::pi));
    CHECK(numerics::unit_sphere_measure(3) == doctest::Approx(4 * std::numbers::pi));
    // β_3 = 2π², β_4 = 8π²/3
    CHECK(numerics::unit_sphere_measure(4) ==
          doctest::Approx(2 * std::numbers::pi * std::numbers::pi).epsilon(1e-14));
    CHECK(numerics::unit_sphere_measure(5) ==
          doctest::Approx(8 * std::numbers::pi * std::numbers::pi / 3).epsilon(1e-14));
}

TEST_CASE("adaptive Simpson reaches its tolerance") {
    const double v = numerics::adaptive_simpson([](double x) { return std::exp(-x * x); }, 0.0, 3.0);
    CHECK(v == doctest::Approx(0.5 * std::sqrt(std::numbers::pi) * std::erf(3.0)).epsilon(1e-12));
    // Symmetric integrand that vanishes at the three initial nodes.
    const double w = numerics::adaptive_simpson(
        [](double x) { return std::sin(4 * std::numbers::pi * x) * std::sin(4 * std::numbers::pi * x); },
        0.0, 1.0);
    CHECK(w == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(numerics::sine_power_integral(1) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(numerics::sine_power_integral(2) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-13));
}

TEST_CASE("bracketed Newton finds roots of increasing functions") {
    const double r = numerics::bracketed_newton([](double x) { return x * x * x - 2.0; },
                                                [](double x) { return 3 * x * x; }, 0.0, 4.0);
    CHECK(r == doctest::Approx(std::cbrt(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(numerics::bracketed_newton([](double x) { return x + 1.0; },
                                               [](double) { return 1.0; }, 0.0, 1.0),
                    InvalidInput);
}

TEST_CASE("compensated summation recovers cancelled bits") {
    std::vector<double> v{1.0, 1e-16, 1e-16, 1e-16, 1e-16, -1.0};
    CHECK(numerics::compensated_sum(v) == doctest::Approx(4e-16).epsilon(1e-12));
}

TEST_CASE("cumulative integral is fourth order and positivity preserving") {
    auto error_for = [](std::size_t n) {
        std::vector<double> y(n), out(n);
        const double h = 1.0 / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) y[i] = std::exp(h * i);
        numerics::cumulative_integral(y, h, out);
        return std::abs(out.back() - (std::exp(1.0) - 1.0));
    };
    const double e1 = error_for(33);
    const double e2 = error_for(65);
    CHECK(std::log2(e1 / e2) > 3.8);

    // A sharp drop would make the cubic increment negative; the limiter keeps it monotone.
    std::vector<double> step{10.0, 10.0, 0.0, 0.0, 0.0, 0.0};
    std::vector<double> out(step.size());
    numerics::cumulative_integral(step, 0.1, out);
    for (std::size_t i = 1; i < out.size(); ++i) CHECK(out[i] >= out[i - 1]);
}
