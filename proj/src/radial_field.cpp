#include "exitmoments/radial_field.hpp"

#include "exitmoments/errors.hpp"
#include "exitmoments/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace exitmoments {

RadialField RadialField::constant(const ModelSpace& space, double radius, std::size_t nodes,
                                  double value) {
    return sampled(space, radius, nodes, [value](double) { return value; });
}

RadialField RadialField::sampled(const ModelSpace& space, double radius, std::size_t nodes,
                                 const std::function<double(double)>& fn) {
    if (nodes < 2) {
        throw InvalidInput("radial grid needs at least two nodes");
    }
    if (!(radius > 0.0)) {
        throw InvalidInput("radial grid needs a positive outer radius");
    }
    RadialField field;
    field.space = space;
    field.radii.resize(nodes);
    field.values.resize(nodes);
    const double h = radius / static_cast<double>(nodes - 1);
    for (std::size_t i = 0; i < nodes; ++i) {
        field.radii[i] = i + 1 == nodes ? radius : h * static_cast<double>(i);
        field.values[i] = fn(field.radii[i]);
    }
    return field;
}

bool RadialField::is_uniform(double rel_tol) const {
    if (radii.size() < 2) return false;
    const double h = spacing();
    for (std::size_t i = 1; i < radii.size(); ++i) {
        if (std::abs((radii[i] - radii[i - 1]) - h) > rel_tol * h) return false;
    }
    return true;
}

void RadialField::validate() const {
    space.validate();
    if (radii.size() < 2 || radii.size() != values.size()) {
        throw InvalidInput("radial field needs >= 2 nodes and matching value count");
    }
    if (radii.front() != 0.0) {
        throw InvalidInput("radial grid must start at r = 0");
    }
    for (std::size_t i = 1; i < radii.size(); ++i) {
        if (!(radii[i] > radii[i - 1])) {
            throw InvalidInput("radial grid must be strictly increasing");
        }
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidInput("radial field has non-finite values");
    }
}

double RadialField::at(double r) const {
    if (r < 0.0 || r > outer_radius() * (1.0 + 1e-12)) {
        throw InvalidInput("radius outside the radial grid");
    }
    const auto it = std::upper_bound(radii.begin(), radii.end(), r);
    if (it == radii.end()) return values.back();
    const std::size_t j = static_cast<std::size_t>(it - radii.begin());
    if (j == 0) return values.front();
    const double t = (r - radii[j - 1]) / (radii[j] - radii[j - 1]);
    return (1.0 - t) * values[j - 1] + t * values[j];
}

std::vector<double> radial_area_weights(const RadialField& field) {
    std::vector<double> w(field.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = geodesic_sphere_area(field.space, field.radii[i]);
    }
    return w;
}

double radial_integral(const RadialField& field) {
    field.validate();
    if (!field.is_uniform()) {
        throw InvalidInput("radial_integral needs a uniform grid");
    }
    const auto area = radial_area_weights(field);
    std::vector<double> integrand(field.size());
    for (std::size_t i = 0; i < integrand.size(); ++i) {
        integrand[i] = field.values[i] * area[i];
    }
    std::vector<double> running(field.size());
    numerics::cumulative_integral(integrand, field.spacing(), running);
    return running.back();
}

} // namespace exitmoments
