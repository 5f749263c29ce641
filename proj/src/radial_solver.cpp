#include "exitmoments/radial_solver.hpp"

#include "exitmoments/errors.hpp"
#include "exitmoments/numerics.hpp"

#include <cmath>

namespace exitmoments {

namespace {

void check_grid(const GeodesicBall& ball, const RadialField& rhs) {
    rhs.validate();
    if (rhs.size() < 4) {
        throw InvalidInput("radial solve needs at least four grid nodes");
    }
    if (!rhs.is_uniform()) {
        throw InvalidInput("radial solve needs a uniform grid");
    }
    if (std::abs(rhs.outer_radius() - ball.radius) > 1e-12 * ball.radius) {
        throw InvalidInput("rhs grid does not end at the ball radius");
    }
    if (rhs.space.kind != ball.space.kind || rhs.space.dimension != ball.space.dimension ||
        std::abs(rhs.space.scale - ball.space.scale) > 1e-14 * ball.space.scale) {
        throw InvalidInput("rhs grid lives in a different model space");
    }
}

} // namespace

RadialSolution radial_poisson_solve_with_derivative(const GeodesicBall& ball,
                                                    const RadialField& rhs) {
    check_grid(ball, rhs);
    for (double f : rhs.values) {
        if (f < 0.0) {
            throw InvalidInput("radial solve needs a nonnegative right-hand side");
        }
    }
    const std::size_t n = rhs.size();
    const double h = rhs.spacing();
    const int d = ball.space.dimension;

    std::vector<double> s_pow(n);
    for (std::size_t i = 0; i < n; ++i) {
        s_pow[i] = std::pow(metric_coefficient(ball.space, rhs.radii[i]), d - 1);
    }
    std::vector<double> weighted(n);
    for (std::size_t i = 0; i < n; ++i) weighted[i] = s_pow[i] * rhs.values[i];
    std::vector<double> inner(n);
    numerics::cumulative_integral(weighted, h, inner);

    // flux(τ) = s^{1-d}(τ) ∫_0^τ s^{d-1} f, which behaves like τ f(0)/d near the
    // center; its limit at τ = 0 is zero.
    std::vector<double> flux(n);
    flux[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        flux[i] = d == 1 ? inner[i] : inner[i] / s_pow[i];
    }

    RadialSolution solution;
    solution.value.space = ball.space;
    solution.value.radii = rhs.radii;
    solution.value.values.assign(n, 0.0);
    // Cumulate inward from the boundary so v(ρ) = 0 exactly and v is monotone.
    for (std::size_t i = n - 1; i-- > 0;) {
        solution.value.values[i] = solution.value.values[i + 1] + numerics::interval_integral(flux, h, i);
    }
    solution.derivative.resize(n);
    for (std::size_t i = 0; i < n; ++i) solution.derivative[i] = -flux[i];
    return solution;
}

RadialField radial_poisson_solve(const GeodesicBall& ball, const RadialField& rhs) {
    return radial_poisson_solve_with_derivative(ball, rhs).value;
}

BallHierarchy moment_hierarchy_ball(const GeodesicBall& ball, int n_moments,
                                    std::size_t n_radii) {
    if (n_moments < 1) {
        throw InvalidInput("moment hierarchy needs N >= 1");
    }
    BallHierarchy result;
    result.moments.volume = ball.volume();
    RadialField previous = RadialField::constant(ball.space, ball.radius, n_radii, 1.0);
    for (int n = 1; n <= n_moments; ++n) {
        RadialField rhs = previous;
        for (double& v : rhs.values) v *= n;
        RadialSolution solved = radial_poisson_solve_with_derivative(ball, rhs);
        result.moments.moments.push_back(radial_integral(solved.value));
        result.profiles.push_back(solved.value);
        result.derivatives.push_back(std::move(solved.derivative));
        previous = std::move(solved.value);
    }
    return result;
}

double pointwise_moment(const GeodesicBall& ball, const RadialField& profile, double r) {
    if (!(r >= 0.0) || r > ball.radius * (1.0 + 1e-12)) {
        throw InvalidInput("pointwise_moment: r outside [0, rho]");
    }
    return profile.at(std::min(r, profile.outer_radius()));
}

double radial_dirichlet_energy(const GeodesicBall& ball, const RadialField& grid,
                               const std::vector<double>& derivative) {
    if (derivative.size() != grid.size()) {
        throw InvalidInput("derivative profile does not match the grid");
    }
    RadialField squared = grid;
    squared.space = ball.space;
    for (std::size_t i = 0; i < derivative.size(); ++i) {
        squared.values[i] = derivative[i] * derivative[i];
    }
    return radial_integral(squared);
}

} // namespace exitmoments
