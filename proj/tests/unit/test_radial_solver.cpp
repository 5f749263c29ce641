#include "exitmoments/errors.hpp"
#include "exitmoments/numerics.hpp"
#include "exitmoments/radial_solver.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>

using namespace exitmoments;
constexpr double kPi = std::numbers::pi;

namespace {

const GeodesicBall kInterval(ModelSpace::euclidean(1), 0.5);
const GeodesicBall kDisc(ModelSpace::euclidean(2), 1.0);
const GeodesicBall kHemisphere(ModelSpace::sphere(1.0, 2), kPi / 2);

double factorial(int n) { return std::exp(numerics::log_factorial(n)); }

} // namespace

TEST_CASE("radial Poisson solve against closed forms") {
    const auto disc = radial_poisson_solve(kDisc, RadialField::constant(kDisc.space, 1.0, 1025, 1.0));
    for (std::size_t i = 0; i < disc.size(); ++i) {
        const double r = disc.radii[i];
        CHECK(disc.values[i] == doctest::Approx((1 - r * r) / 4).epsilon(1e-12));
    }
    CHECK(disc.values.front() == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(disc.values.back() == 0.0);

    const auto hemi =
        radial_poisson_solve(kHemisphere, RadialField::constant(kHemisphere.space, kPi / 2, 2049, 1.0));
    for (std::size_t i = 0; i < hemi.size(); ++i) {
        CHECK(hemi.values[i] == doctest::Approx(std::log(1 + std::cos(hemi.radii[i]))).epsilon(1e-10));
    }
    CHECK(hemi.values.front() == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    const auto zero = radial_poisson_solve(kDisc, RadialField::constant(kDisc.space, 1.0, 64, 0.0));
    for (double v : zero.values) CHECK(v == 0.0);
}

TEST_CASE("radial Poisson solve errors") {
    auto negative = RadialField::constant(kDisc.space, 1.0, 64, 1.0);
    negative.values[10] = -1e-3;
    CHECK_THROWS_AS(radial_poisson_solve(kDisc, negative), InvalidInput);
    CHECK_THROWS_AS(radial_poisson_solve(kDisc, RadialField::constant(kDisc.space, 0.9, 64, 1.0)),
                    InvalidInput);
    CHECK_THROWS_AS(radial_poisson_solve(kHemisphere, RadialField::constant(kDisc.space, kPi / 2, 64, 1.0)),
                    InvalidInput);
    CHECK_THROWS_AS(moment_hierarchy_ball(kDisc, 0), InvalidInput);
}

TEST_CASE("moment hierarchy on balls, frozen oracle values") {
    const auto interval = moment_hierarchy_ball(kInterval, 8);
    // mpmath: T_n = n! (8/π^{2n+2}) (1 - 2^{-2n-2}) ζ(2n+2)
    CHECK(std::abs(interval.moments[1] / (1.0 / 12) - 1) <= 1e-8);
    CHECK(std::abs(interval.moments[2] / (1.0 / 60) - 1) <= 1e-8);
    CHECK(interval.moments[3] == doctest::Approx(0.0050595238095238095238).epsilon(1e-9));
    CHECK(interval.moments[8] == doctest::Approx(0.00036300516386300700026).epsilon(1e-9));
    CHECK(interval.moments.volume == doctest::Approx(1.0));

    const auto disc = moment_hierarchy_ball(kDisc, 3);
    CHECK(std::abs(disc.moments[1] / (kPi / 8) - 1) <= 1e-7);
    // sympy hierarchy: T_2 = 0.1308996938995747..., T_3 = 0.06749515466696821...
    CHECK(disc.moments[2] == doctest::Approx(0.13089969389957471827).epsilon(1e-9));
    CHECK(disc.moments[3] == doctest::Approx(0.067495154666968214108).epsilon(1e-9));

    const auto ball3 = moment_hierarchy_ball(GeodesicBall(ModelSpace::euclidean(3), 1.0), 2);
    CHECK(ball3.moments[1] == doctest::Approx(0.27925268031909273231).epsilon(1e-9));
    CHECK(ball3.moments[2] == doctest::Approx(0.053190986727446234725).epsilon(1e-9));

    const auto hemi = moment_hierarchy_ball(kHemisphere, 2);
    CHECK(std::abs(hemi.moments[1] / (2 * kPi * (2 * std::log(2.0) - 1)) - 1) <= 1e-6);

    const auto cap = moment_hierarchy_ball(GeodesicBall(ModelSpace::sphere(1.0, 2), kPi / 3), 1);
    CHECK(cap.moments[1] == doctest::Approx(0.47352688794621315981).epsilon(1e-9));
}

TEST_CASE("pointwise moments") {
    const auto interval = moment_hierarchy_ball(kInterval, 1);
    CHECK(pointwise_moment(kInterval, interval.profiles[0], 0.0) == doctest::Approx(0.125).epsilon(1e-12));
    const auto disc = moment_hierarchy_ball(kDisc, 1);
    CHECK(pointwise_moment(kDisc, disc.profiles[0], 1.0) == 0.0);
    const auto hemi = moment_hierarchy_ball(kHemisphere, 1);
    CHECK(pointwise_moment(kHemisphere, hemi.profiles[0], 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(pointwise_moment(kHemisphere, hemi.profiles[0], kPi / 4) ==
          doctest::Approx(0.53479999673957037052).epsilon(1e-7));
    CHECK_THROWS_AS(pointwise_moment(kDisc, disc.profiles[0], 1.5), InvalidInput);
}

TEST_CASE("hierarchy identities on the disc: energy and L2") {
    const auto h = moment_hierarchy_ball(kDisc, 8);
    for (int k = 1; k <= 4; ++k) {
        const auto& u = h.profiles[k - 1];
        const double energy = radial_dirichlet_energy(kDisc, u, h.derivatives[k - 1]);
        const double energy_expected = factorial(k) * factorial(k) / factorial(2 * k - 1) * h.moments[2 * k - 1];
        CHECK(std::abs(energy / energy_expected - 1) <= 1e-6);

        RadialField squared = u;
        for (double& v : squared.values) v *= v;
        const double l2 = radial_integral(squared);
        const double l2_expected = factorial(k) * factorial(k) / factorial(2 * k) * h.moments[2 * k];
        CHECK(std::abs(l2 / l2_expected - 1) <= 1e-6);
    }
}

TEST_CASE("maximum principle: profiles are nonnegative, nonincreasing, peak at the centre") {
    for (const auto& ball : {kInterval, kDisc, kHemisphere,
                             GeodesicBall(ModelSpace::hyperbolic(-1.0, 3), 1.5),
                             GeodesicBall(ModelSpace::sphere(2.0, 4), 4.0)}) {
        const auto h = moment_hierarchy_ball(ball, 4, 513);
        for (const auto& u : h.profiles) {
            CHECK(u.values.back() == 0.0);
            for (std::size_t i = 1; i < u.size(); ++i) {
                CHECK(u.values[i] <= u.values[i - 1]);
                CHECK(u.values[i] >= 0.0);
            }
        }
    }
}

TEST_CASE("grid convergence of T_1 on a spherical cap") {
    // On the flat disc the profiles are polynomials and the rule is exact; the cap is not.
    const GeodesicBall cap(ModelSpace::sphere(1.0, 2), kPi / 3);
    const double exact = 0.47352688794621315981;
    const double e1 = std::abs(moment_hierarchy_ball(cap, 1, 17).moments[1] - exact);
    const double e2 = std::abs(moment_hierarchy_ball(cap, 1, 33).moments[1] - exact);
    const double e3 = std::abs(moment_hierarchy_ball(cap, 1, 65).moments[1] - exact);
    CHECK(std::log2(e1 / e2) >= 1.9);
    CHECK(std::log2(e2 / e3) >= 1.9);
}
