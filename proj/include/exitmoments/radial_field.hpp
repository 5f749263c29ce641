#pragma once

#include "exitmoments/model_space.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace exitmoments {

/// A function of geodesic radius sampled on a grid over [0, ρ].
struct RadialField {
    ModelSpace space;
    std::vector<double> radii;
    std::vector<double> values;

    /// Uniform grid with `nodes` nodes on [0, radius], constant value.
    static RadialField constant(const ModelSpace& space, double radius, std::size_t nodes,
                                double value);
    static RadialField sampled(const ModelSpace& space, double radius, std::size_t nodes,
                               const std::function<double(double)>& fn);

    std::size_t size() const { return radii.size(); }
    double outer_radius() const { return radii.back(); }
    /// Spacing of a uniform grid (radii[1] - radii[0]).
    double spacing() const { return radii[1] - radii[0]; }
    bool is_uniform(double rel_tol = 1e-9) const;

    /// Throws InvalidInput unless radii start at 0, increase strictly, and values are finite.
    void validate() const;

    /// Piecewise-linear value at r in [0, ρ].
    double at(double r) const;
};

/// ∫_ball f dV = β_{d-1} ∫_0^ρ f(r) s(r)^{d-1} dr (uniform grids only).
double radial_integral(const RadialField& field);

/// Metric weights s(r_i)^{d-1} β_{d-1} at the grid nodes.
std::vector<double> radial_area_weights(const RadialField& field);

} // namespace exitmoments
