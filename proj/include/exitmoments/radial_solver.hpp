#pragma once

#include "exitmoments/model_space.hpp"
#include "exitmoments/moments.hpp"
#include "exitmoments/radial_field.hpp"

#include <cstddef>
#include <vector>

namespace exitmoments {

inline constexpr std::size_t kDefaultRadialNodes = 4096;

/// Solution of the radial Dirichlet problem together with its derivative.
struct RadialSolution {
    RadialField value;
    std::vector<double> derivative; // dv/dr at the grid nodes (<= 0 for rhs >= 0)
};

/// Solves -s^{1-d}(s^{d-1} v')' = rhs on the ball with v(ρ) = 0, v'(0) = 0:
///   v(r) = ∫_r^ρ s^{1-d}(τ) ∫_0^τ s^{d-1}(ξ) rhs(ξ) dξ dτ.
/// Both integrals are cumulative fourth-order quadratures on the rhs grid,
/// which must be uniform, end at the ball radius, and be nonnegative.
RadialSolution radial_poisson_solve_with_derivative(const GeodesicBall& ball,
                                                    const RadialField& rhs);

RadialField radial_poisson_solve(const GeodesicBall& ball, const RadialField& rhs);

struct BallHierarchy {
    MomentSequence moments;
    std::vector<RadialField> profiles;           // u_1..u_N
    std::vector<std::vector<double>> derivatives; // u_n' on the same grid
};

/// Poisson hierarchy -Δu_n = n u_{n-1}, u_0 = 1, on a geodesic ball.
BallHierarchy moment_hierarchy_ball(const GeodesicBall& ball, int n_moments,
                                    std::size_t n_radii = kDefaultRadialNodes);

/// u_n at geodesic distance r from the center (linear interpolation).
double pointwise_moment(const GeodesicBall& ball, const RadialField& profile, double r);

/// ∫_B |∇u|² dV from a derivative profile.
double radial_dirichlet_energy(const GeodesicBall& ball, const RadialField& grid,
                               const std::vector<double>& derivative);

} // namespace exitmoments
