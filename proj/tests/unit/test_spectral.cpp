#include "exitmoments/errors.hpp"
#include "exitmoments/grid_solver.hpp"
#include "exitmoments/numerics.hpp"
#include "exitmoments/radial_solver.hpp"
#include "exitmoments/spectral.hpp"

#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace exitmoments;
constexpr double kPi = std::numbers::pi;
constexpr double kPi2 = kPi * kPi;

namespace {

double factorial(int n) { return std::exp(numerics::log_factorial(n)); }

// Interval of length `width`: ν = (mπ/width)², a² = 8 width/(mπ)², m odd.
SpectralData interval_spectrum(int terms, double width = 1.0) {
    SpectralData s;
    s.volume = width;
    for (int j = 0; j < terms; ++j) {
        const double m = 2 * j + 1;
        s.pairs.push_back({m * m * kPi2 / (width * width), 8 * width / (m * m * kPi2)});
    }
    return s;
}

// n! Σ_{m odd} 8/(mπ)^{2n+2} from tests/oracles/compute_oracles.py.
constexpr double kIntervalT[] = {0.083333333333333333333,   0.016666666666666666667,
                                 0.0050595238095238095238,  0.0020502645502645502646,
                                 0.0010386604136604136604,  0.00063142875642875642876,
                                 0.00044783967961051294385, 0.00036300516386300700026};

MomentSequence interval_moments(int n_moments) {
    return moments_from_spectrum(interval_spectrum(20000), n_moments).moments;
}

} // namespace

TEST_CASE("moments from a truncated spectrum") {
    const auto truncated = moments_from_spectrum(interval_spectrum(10), 8);
    CHECK(truncated.moments[2] == doctest::Approx(1.0 / 60).epsilon(1e-9));
    CHECK(std::abs(truncated.moments[1] - 1.0 / 12) <= 1e-5);
    for (int n = 1; n <= 8; ++n) {
        const double exact = kIntervalT[n - 1];
        const double tail = truncated.tail_bound[n - 1];
        CHECK(truncated.moments[n] <= exact * (1 + 1e-14));
        CHECK(truncated.moments[n] + tail >= exact * (1 - 1e-14));
        if (n >= 2) CHECK(std::abs(truncated.moments[n] - exact) <= 1e-6 * exact);
    }
    const SpectralData single{2.5, {{1.0, 2.5}}};
    const auto one = moments_from_spectrum(single, 10);
    for (int n = 1; n <= 10; ++n) {
        CHECK(one.moments[n] == doctest::Approx(factorial(n) * 2.5).epsilon(1e-14));
        CHECK(one.tail_bound[n - 1] == 0.0);
    }
    CHECK_THROWS_AS(moments_from_spectrum(SpectralData{1.0, {}}, 3), InvalidInput);
}

TEST_CASE("zeta identity against the radial hierarchy") {
    const GeodesicBall interval(ModelSpace::euclidean(1), 0.5);
    const auto radial = moment_hierarchy_ball(interval, 8).moments;
    const auto series = interval_moments(8);
    for (int n = 1; n <= 8; ++n) {
        CHECK(std::abs(radial[n] - kIntervalT[n - 1]) <= 1e-6 * kIntervalT[n - 1]);
        CHECK(std::abs(series[n] - radial[n]) <= 1e-6 * radial[n]);
    }
}

TEST_CASE("heat content") {
    const auto spec = interval_spectrum(10);
    CHECK(heat_content(spec, 0.05) == doctest::Approx(0.49591217979745144161).epsilon(1e-12));
    const double t_late = 40.0 / kPi2;
    CHECK(heat_content(spec, t_late) ==
          doctest::Approx(spec.pairs[0].a_sq * std::exp(-40.0)).epsilon(1e-12));
    CHECK(heat_content(spec, 1e-14) == doctest::Approx(spec.partition_sum()).epsilon(1e-9));
    double previous = spec.partition_sum();
    for (double t = 1e-4; t < 2.0; t *= 1.3) {
        const double h = heat_content(spec, t);
        CHECK(h < previous);
        previous = h;
    }
    CHECK_THROWS_AS(heat_content(spec, 0.0), InvalidInput);
}

TEST_CASE("volume partition defect") {
    CHECK(volume_partition_defect(interval_spectrum(10)) ==
          doctest::Approx(0.020247408507700346879).epsilon(1e-12));
    CHECK(volume_partition_defect(SpectralData{3.0, {{2.0, 3.0}}}) == 0.0);
    CHECK(volume_partition_defect(SpectralData{3.0, {}}) == 3.0);
    CHECK(volume_partition_defect(interval_spectrum(20000)) >= 0.0);
}

TEST_CASE("recovery is exact on a single pair") {
    MomentSequence m{1.7, {}};
    for (int n = 1; n <= 12; ++n) m.moments.push_back(factorial(n) * 1.7 * std::pow(3.0, -n));
    const auto r = recover_spectrum(m, 3);
    REQUIRE(!r.pairs.empty());
    CHECK(r.pairs[0].nu == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(r.pairs[0].a_sq == doctest::Approx(1.7).epsilon(1e-10));
    CHECK(r.pairs.size() == 1);
    CHECK(r.stop == RecoveryStop::noise_floor);
}

TEST_CASE("recovery of the interval spectrum") {
    const auto r = recover_spectrum(interval_moments(24), 4);
    REQUIRE(r.pairs.size() >= 2);
    CHECK(r.pairs[0].nu == doctest::Approx(kPi2).epsilon(5e-3));
    CHECK(r.pairs[0].a_sq == doctest::Approx(8 / kPi2).epsilon(1e-2));
    CHECK(r.pairs[1].nu == doctest::Approx(9 * kPi2).epsilon(5e-2));
    CHECK(r.pairs[1].a_sq == doctest::Approx(8 / (9 * kPi2)).epsilon(5e-2));
    // The reported error estimates cover the actual errors.
    CHECK(std::abs(r.pairs[0].nu - kPi2) <= r.pairs[0].nu_error);
    CHECK(std::abs(r.pairs[1].nu - 9 * kPi2) <= r.pairs[1].nu_error);
    CHECK(std::abs(r.pairs[0].a_sq - 8 / kPi2) <= r.pairs[0].a_sq_error);
    CHECK_THROWS_AS(recover_spectrum(interval_moments(6), 2), InvalidInput);
}

TEST_CASE("recovery round trip on the torus band spectrum") {
    const auto spec = interval_spectrum(20000, 0.5);
    const auto r = recover_spectrum(moments_from_spectrum(spec, 24).moments, 2);
    REQUIRE(r.pairs.size() == 2);
    CHECK(r.pairs[0].nu == doctest::Approx(spec.pairs[0].nu).epsilon(1e-2));
    CHECK(r.pairs[0].a_sq == doctest::Approx(spec.pairs[0].a_sq).epsilon(1e-2));
    CHECK(r.pairs[1].nu == doctest::Approx(spec.pairs[1].nu).epsilon(5e-2));
    CHECK(r.pairs[1].a_sq == doctest::Approx(spec.pairs[1].a_sq).epsilon(5e-2));
}

TEST_CASE("recovery stops at the noise floor") {
    auto noisy = interval_moments(24);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (auto& t : noisy.moments) t *= 1 + 1e-12 * dist(rng);
    const auto r = recover_spectrum(noisy, 5, {1e-12, 10.0});
    REQUIRE(!r.pairs.empty());
    CHECK(r.pairs[0].nu == doctest::Approx(kPi2).epsilon(1e-2));
    CHECK(r.pairs.size() < 3);
    CHECK(r.stop == RecoveryStop::noise_floor);
    CHECK(!r.stop_reason.empty());
    // Undeclared noise is detected from the ratio sequence.
    const auto blind = recover_spectrum(noisy, 5);
    CHECK(blind.pairs.size() < 3);
    CHECK(blind.stop == RecoveryStop::noise_floor);
}

TEST_CASE("recovered spectrum reproduces the heat content") {
    const auto exact = interval_spectrum(20000);
    const auto r = recover_spectrum(moments_from_spectrum(exact, 24).moments, 4);
    const double defect = volume_partition_defect(r.spectral);
    CHECK(defect > 0.0);
    for (double t = 1 / kPi2; t <= 20 / kPi2; t *= 1.5) {
        double extrapolation = 0;
        for (const auto& p : r.pairs) {
            extrapolation += (p.a_sq_error + p.a_sq * t * p.nu_error) * std::exp(-p.nu * t);
        }
        const double gap = std::abs(heat_content(r.spectral, t) - heat_content(exact, t));
        CHECK(gap <= defect + extrapolation);
    }
}

TEST_CASE("eigenvalue bounds on the interval") {
    const MomentSequence hand{1.0, {1.0 / 12, 1.0 / 60}};
    const auto first = eigenvalue_bound(hand, {}, 1, 1);
    CHECK(first.bound == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(first.bound >= kPi2);
    CHECK(!first.vacuous);

    const auto spec = interval_spectrum(20000);
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 6; ++k) {
        const auto tail = eigenvalue_bound_tail(spec, 1, k, 0.0);
        CHECK(tail.bound <= previous);
        CHECK(tail.bound >= kPi2 * (1 - 1e-14));
        previous = tail.bound;
    }
    CHECK(previous == doctest::Approx(kPi2).epsilon(1e-4));
    CHECK(previous == doctest::Approx(9.8696044011204213282).epsilon(1e-10));

    const auto third = eigenvalue_bound_tail(spec, 3, 6, 2 * kPi2);
    CHECK(third.bound == doctest::Approx(88.826709088390927846).epsilon(1e-10));
    CHECK(third.bound == doctest::Approx(9 * kPi2).epsilon(1e-2));
    CHECK(third.subtracted_terms.size() == 1);
    CHECK(eigenvalue_bound_tail(spec, 3, 3, 2 * kPi2).bound > third.bound);
}

TEST_CASE("moment-route bounds and vacuous results") {
    const auto moments = interval_moments(24);
    const SpectralData below{1.0, {{kPi2, 8 / kPi2}}};
    for (int k = 1; k <= 12; ++k) {
        const auto b = eigenvalue_bound(moments, {}, 1, k);
        REQUIRE(!b.vacuous);
        CHECK(b.bound >= kPi2 * (1 - 1e-12));
        CHECK(b.route == "moments");
    }
    const auto sub = eigenvalue_bound(moments, below, 3, 6);
    CHECK(!sub.vacuous);
    CHECK(sub.bound == doctest::Approx(9 * kPi2).epsilon(1e-2));
    // Subtraction cancels all significant digits well before k = 12.
    const auto lost = eigenvalue_bound(moments, below, 3, 12);
    CHECK(lost.vacuous);
    CHECK(std::isinf(lost.bound));
    CHECK_THROWS_AS(eigenvalue_bound(moments, {}, 1, 13), InvalidInput);
}

TEST_CASE("bounds dominate the grid eigenvalue") {
    const auto domain = build_domain(ClosedSurface::flat_torus(1, 1, 64, 64), MaskSpec::rectangle(0.2, 0.7, 0.3, 0.6));
    const auto moments = moment_hierarchy_grid(domain, 12).moments;
    const double lambda = dirichlet_eigenpairs(domain, 1).eigenvalues[0];
    for (int k = 1; k <= 6; ++k) {
        const auto b = eigenvalue_bound(moments, {}, 1, k, 1e-10);
        if (!b.vacuous) CHECK(b.bound >= lambda * (1 - 1e-8));
    }
}
