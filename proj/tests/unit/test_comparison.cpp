#include "exitmoments/comparison.hpp"
#include "exitmoments/errors.hpp"
#include "exitmoments/radial_solver.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace exitmoments;
constexpr double kPi = std::numbers::pi;

namespace {

const ClosedSurface kTorus = ClosedSurface::flat_torus(1, 1, 128, 128);
const ClosedSurface kSphere = ClosedSurface::round_sphere(1, 96, 192);
const MaskSpec kSquare = MaskSpec::rectangle(0, 0.5, 0, 0.5);
const MaskSpec kSphereRect = MaskSpec::rectangle(kPi / 3, 2 * kPi / 3, 0, kPi / 2);

} // namespace

TEST_CASE("symmetrized ball") {
    const auto s2 = ModelSpace::sphere(1, 2);
    CHECK(symmetrized_ball(1, 2, s2).radius == doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK(symmetrized_ball(1, 4, s2).radius == doctest::Approx(kPi / 3).epsilon(1e-12));
    CHECK(symmetrized_ball(1 - 1e-12, 1, s2).radius == doctest::Approx(kPi).epsilon(1e-5));
    const auto ball = symmetrized_ball(0.3, 1.7, ModelSpace::sphere(2.5, 2));
    CHECK(ball.volume() / (4 * kPi * 2.5 * 2.5) == doctest::Approx(0.3 / 1.7).epsilon(1e-8));
    CHECK_THROWS_AS(symmetrized_ball(2, 1, s2), InvalidInput);
    CHECK_THROWS_AS(symmetrized_ball(0.5, 1, ModelSpace::euclidean(2)), InvalidInput);
}

TEST_CASE("comparison spheres") {
    CHECK(comparison_sphere(kSphere, SphereChoice::sqrtK).scale == doctest::Approx(1.0));
    CHECK(comparison_sphere(kSphere, SphereChoice::bbg_R).scale == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(comparison_sphere(kTorus, SphereChoice::bbg_R).scale > 0.0);
    CHECK_THROWS_AS(comparison_sphere(kTorus, SphereChoice::sqrtK), InvalidInput);
    CHECK(sphere_choice_from_string("bbg_R") == SphereChoice::bbg_R);
    CHECK(to_string(SphereChoice::sqrtK) == "sqrtK");
    CHECK_THROWS_AS(sphere_choice_from_string("R"), InvalidInput);
}

TEST_CASE("moment comparison on the torus square") {
    const auto report = moment_comparison_report(kTorus, kSquare, 5, SphereChoice::bbg_R);
    REQUIRE(report.margin.size() == 5);
    CHECK(report.domain_ratio.size() == 5);
    CHECK(report.cap_ratio.size() == 5);
    CHECK(report.all_pass());
    for (std::size_t n = 0; n < 5; ++n) {
        CHECK(report.margin[n] > report.budget[n]);
        CHECK(report.margin[n] == doctest::Approx(report.cap_ratio[n] - report.domain_ratio[n]));
    }
    std::ostringstream table;
    write_summary(table, report);
    CHECK(table.str().find("pass") != std::string::npos);
}

TEST_CASE("moment comparison on a spherical rectangle") {
    const auto sqrt_k = moment_comparison_report(kSphere, kSphereRect, 5, SphereChoice::sqrtK);
    CHECK(sqrt_k.all_pass());
    for (std::size_t n = 0; n < 5; ++n) CHECK(sqrt_k.margin[n] > sqrt_k.budget[n]);
    // On a round sphere both choices give S²(1), so the margins agree.
    const auto bbg = moment_comparison_report(kSphere, kSphereRect, 5, SphereChoice::bbg_R);
    for (std::size_t n = 0; n < 5; ++n) {
        CHECK(bbg.margin[n] <= sqrt_k.margin[n] + 1e-9 * sqrt_k.cap_ratio[n]);
    }
}

TEST_CASE("a centered cap is its own symmetrization") {
    const auto report = moment_comparison_report(kSphere, MaskSpec::cap(0, 0, kPi / 3), 5, SphereChoice::sqrtK);
    CHECK(report.ball_radius == doctest::Approx(kPi / 3).epsilon(1e-3));
    for (std::size_t n = 0; n < 5; ++n) CHECK(std::abs(report.margin[n]) <= report.budget[n]);
}

TEST_CASE("pointwise comparison of the symmetrized solution") {
    const auto zero = pde_comparison_check(kTorus, kSquare, [](double, double) { return 0.0; },
                                           SphereChoice::bbg_R);
    CHECK(zero.max_violation == 0.0);
    CHECK(zero.pass);

    const auto square = pde_comparison_check(kTorus, kSquare, [](double, double) { return 1.0; },
                                             SphereChoice::bbg_R);
    CHECK(square.pass);
    CHECK(square.max_violation <= square.budget);
    CHECK(square.radii.size() == square.v.size());

    const auto bump = pde_comparison_check(
        kTorus, kSquare, [](double x, double y) { return 1 + std::sin(2 * kPi * x) * std::cos(2 * kPi * y); },
        SphereChoice::bbg_R);
    CHECK(bump.pass);

    const auto cap = pde_comparison_check(kSphere, MaskSpec::cap(0, 0, kPi / 3),
                                          [](double, double) { return 1.0; }, SphereChoice::sqrtK);
    CHECK(cap.max_gap <= cap.budget);
}

TEST_CASE("Cheeger bound") {
    for (int k = 1; k <= 3; ++k) {
        // Circle of length 1, arc of length 1/2: C = 4.
        const GeodesicBall arc(ModelSpace::euclidean(1), 0.25);
        const auto arc_moments = moment_hierarchy_ball(arc, 5).moments;
        const auto a = cheeger_bound_check(4.0, 0.5, 1.0, arc_moments, k);
        CHECK(a.pass);
        CHECK(a.slack > 0.0);
        if (k == 1) CHECK(a.rhs == doctest::Approx(12 / 0.25).epsilon(1e-8));

        const GeodesicBall cap(ModelSpace::sphere(1, 2), kPi / 3);
        const auto c = cheeger_bound_check(1.0, cap.volume(), 4 * kPi, moment_hierarchy_ball(cap, 5).moments, k);
        CHECK(c.pass);
        CHECK(c.slack > 0.0);
    }
    const auto square = build_domain(kTorus, kSquare);
    const auto grid = moment_hierarchy_grid(square, 5).moments;
    for (int k = 1; k <= 3; ++k) {
        const auto s = cheeger_bound_check(4.0, square.volume, 1.0, grid, k);
        CHECK(s.pass);
        CHECK(s.lhs == doctest::Approx(16.0));
    }
    CHECK_THROWS_AS(cheeger_bound_check(4.0, 0.6, 1.0, grid, 1), InvalidInput);
    CHECK_THROWS_AS(cheeger_bound_check(4.0, 0.25, 1.0, grid, 4), InvalidInput);
}

TEST_CASE("first eigenvalue of balls from their moments") {
    double error = 0;
    const double hemi = ball_first_eigenvalue(GeodesicBall(ModelSpace::sphere(1, 2), kPi / 2), 4096, &error);
    CHECK(hemi == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(std::abs(hemi - 2.0) <= error);
    const double cap = ball_first_eigenvalue(GeodesicBall(ModelSpace::sphere(1, 2), kPi / 3), 4096);
    CHECK(cap == doctest::Approx(4.9360418654035256588).epsilon(1e-6));
    const double disc = ball_first_eigenvalue(GeodesicBall(ModelSpace::euclidean(2), 1.0), 4096);
    CHECK(disc == doctest::Approx(5.783185962946784).epsilon(1e-6));
}

TEST_CASE("Faber-Krahn ordering") {
    const auto hemi = faber_krahn_check(ClosedSurface::round_sphere(1, 64, 128), MaskSpec::cap(0, 0, kPi / 2),
                                        SphereChoice::sqrtK);
    CHECK(std::abs(hemi.lambda_domain - hemi.lambda_star) <= 2e-2);
    CHECK(hemi.pass);
    const auto square = faber_krahn_check(kTorus, kSquare, SphereChoice::bbg_R);
    CHECK(square.pass);
    CHECK(square.lambda_domain == doctest::Approx(8 * kPi * kPi).epsilon(5e-3));
    CHECK(square.slack > square.budget);
    const auto thin = faber_krahn_check(kTorus, MaskSpec::rectangle(0.1, 0.9, 0.4, 0.5), SphereChoice::bbg_R);
    CHECK(thin.pass);
    CHECK(thin.lambda_domain > 0.9 * kPi * kPi / 0.01);
    CHECK(thin.slack > square.slack);
}
