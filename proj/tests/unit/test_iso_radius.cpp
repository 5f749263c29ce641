#include "exitmoments/errors.hpp"
#include "exitmoments/iso_radius.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>

using namespace exitmoments;
constexpr double kPi = std::numbers::pi;

TEST_CASE("comparison radius, three branches") {
    CHECK(std::abs(comparison_radius({1.0, 2, kPi}) - 1.0) <= 1e-12);
    CHECK(std::abs(comparison_radius({0.0, 2, 1.0}) - 1.0 / (std::sqrt(5.0) - 1.0)) <= 1e-10);
    // mpmath: 1/C(1) with the d = 2 quadratic
    CHECK(comparison_radius({-1.0, 2, 1.0}) == doctest::Approx(0.8920134149120727068).epsilon(1e-10));
    // mpmath oracles for d = 3
    CHECK(comparison_radius({1.0, 3, 2.0}) == doctest::Approx(0.97471896622868482648).epsilon(1e-11));
    CHECK(comparison_radius({0.0, 3, 1.0}) == doctest::Approx(1.2696651446276532114).epsilon(1e-11));
}

TEST_CASE("comparison radius errors") {
    CHECK_THROWS_AS(comparison_radius({1.0, 2, 3.5}), InvalidInput);   // Myers
    CHECK_THROWS_AS(comparison_radius({0.0, 1, 1.0}), InvalidInput);   // d < 2
    CHECK_THROWS_AS(comparison_radius({0.0, 2, 0.0}), InvalidInput);
    CHECK_THROWS_AS(isoperimetric_constant(0.0, 2), InvalidInput);
    CHECK_THROWS_AS(isoperimetric_constant(-1.0, 2), InvalidInput);
}

TEST_CASE("isoperimetric constant C(z)") {
    // d = 2: (cosh z - 1) x² + sinh z x - 2 = 0
    const double z = 1.0;
    const double a = std::cosh(z) - 1.0;
    const double b = std::sinh(z);
    const double quadratic = (-b + std::sqrt(b * b + 8.0 * a)) / (2.0 * a);
    CHECK(std::abs(isoperimetric_constant(1.0, 2) - quadratic) <= 1e-10);
    CHECK(isoperimetric_constant(1.0, 2) == doctest::Approx(1.1210593734160059871).epsilon(1e-13));

    // Small z, d = 2: y = x z solves y + y²/2 = 2, so x z -> √5 - 1.
    const double tiny = 1e-6;
    CHECK(isoperimetric_constant(tiny, 2) * tiny == doctest::Approx(std::sqrt(5.0) - 1.0).epsilon(1e-5));

    // mpmath brute-force bisection oracles
    CHECK(std::abs(isoperimetric_constant(2.0, 3) - 0.15666868173666275493) <= 1e-10);
    CHECK(std::abs(isoperimetric_constant(0.5, 4) - 1.0858562903303857145) <= 1e-10);
}

TEST_CASE("property: comparison radius monotonicity and scaling") {
    // K > 0: nondecreasing in the diameter, and R(π/√K) = 1/√K.
    for (double K : {0.25, 1.0, 4.0}) {
        double previous = 0.0;
        for (int i = 1; i <= 20; ++i) {
            const double diam = i / 20.0 * kPi / std::sqrt(K);
            const double r = comparison_radius({K, 3, diam});
            CHECK(r >= previous);
            CHECK(r <= 1.0 / std::sqrt(K) * (1 + 1e-14));
            previous = r;
        }
        CHECK(std::abs(comparison_radius({K, 2, kPi / std::sqrt(K)}) - 1.0 / std::sqrt(K)) <= 1e-12);
        CHECK(std::abs(comparison_radius({K, 4, kPi / std::sqrt(K)}) - 1.0 / std::sqrt(K)) <= 1e-12);
    }
    // K = 0: linear in the diameter.
    for (int d = 2; d <= 5; ++d) {
        const double base = comparison_radius({0.0, d, 1.0});
        CHECK(comparison_radius({0.0, d, 3.7}) == doctest::Approx(3.7 * base).epsilon(1e-14));
    }
    // K < 0: residual of the defining equation at the returned constant.
    for (int d = 2; d <= 5; ++d) {
        for (double zz : {0.01, 0.3, 1.0, 2.5}) {
            const double x = isoperimetric_constant(zz, d);
            CHECK(std::abs(isoperimetric_residual(x, zz, d)) <= 1e-9);
        }
    }
}

TEST_CASE("continuity at K = 0 from the negative side") {
    for (int d = 2; d <= 4; ++d) {
        const double flat = comparison_radius({0.0, d, 1.0});
        CHECK(comparison_radius({-1e-6, d, 1.0}) == doctest::Approx(flat).epsilon(1e-4));
        CHECK(comparison_radius({-1e-9, d, 1.0}) == doctest::Approx(flat).epsilon(1e-4));
    }
}

TEST_CASE("positive branch as K -> 0+ follows its closed form, not the flat value") {
    // For small K the positive-curvature formula reduces to
    //   R ≈ K^{1/(2d) - 1/2} (diam / ∫_0^π sin^{d-1})^{1/d},
    // which diverges; the flat branch is not its limit.
    const double diam = 1.0;
    const int d = 2;
    for (double K : {1e-4, 1e-6, 1e-8}) {
        const double asymptotic = std::pow(K, 1.0 / (2 * d) - 0.5) * std::pow(diam / 2.0, 1.0 / d);
        CHECK(comparison_radius({K, d, diam}) == doctest::Approx(asymptotic).epsilon(1e-3));
    }
    CHECK(comparison_radius({1e-8, d, diam}) > 10 * comparison_radius({0.0, d, diam}));
}
