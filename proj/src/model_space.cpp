#include "exitmoments/model_space.hpp"

#include "exitmoments/errors.hpp"
#include "exitmoments/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace exitmoments {

namespace {

constexpr double kPi = std::numbers::pi;

void check_radius(const ModelSpace& space, double t, const char* who) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw InvalidInput(std::string(who) + ": radius must be finite and >= 0");
    }
    if (space.kind == SpaceKind::spherical && t > kPi * space.scale * (1.0 + 1e-14)) {
        throw InvalidInput(std::string(who) + ": radius exceeds pi*R on the sphere");
    }
}

// x - sin(2x)/2, accurate for small x.
double sin_defect(double x) {
    if (std::abs(x) < 1e-2) {
        const double x2 = x * x;
        return x * x2 * (2.0 / 3.0 - x2 * (2.0 / 15.0 - x2 * 4.0 / 315.0));
    }
    return x - 0.5 * std::sin(2.0 * x);
}

// sinh(2x)/2 - x, accurate for small x.
double sinh_excess(double x) {
    if (std::abs(x) < 1e-2) {
        const double x2 = x * x;
        return x * x2 * (2.0 / 3.0 + x2 * (2.0 / 15.0 + x2 * 4.0 / 315.0));
    }
    return 0.5 * std::sinh(2.0 * x) - x;
}

} // namespace

std::string to_string(SpaceKind kind) {
    switch (kind) {
    case SpaceKind::spherical: return "sphere";
    case SpaceKind::euclidean: return "euclidean";
    case SpaceKind::hyperbolic: return "hyperbolic";
    }
    return "unknown";
}

SpaceKind space_kind_from_string(const std::string& name) {
    if (name == "sphere" || name == "spherical") return SpaceKind::spherical;
    if (name == "euclidean" || name == "flat") return SpaceKind::euclidean;
    if (name == "hyperbolic") return SpaceKind::hyperbolic;
    throw InvalidInput("unknown space kind '" + name + "'");
}

ModelSpace ModelSpace::sphere(double radius, int dimension) {
    ModelSpace s{SpaceKind::spherical, radius, dimension};
    s.validate();
    return s;
}

ModelSpace ModelSpace::euclidean(int dimension) {
    ModelSpace s{SpaceKind::euclidean, 1.0, dimension};
    s.validate();
    return s;
}

ModelSpace ModelSpace::hyperbolic(double curvature, int dimension) {
    if (!(curvature < 0.0)) {
        throw InvalidInput("hyperbolic space needs curvature K < 0");
    }
    ModelSpace s{SpaceKind::hyperbolic, 1.0 / std::sqrt(-curvature), dimension};
    s.validate();
    return s;
}

void ModelSpace::validate() const {
    if (dimension < 1) {
        throw InvalidInput("model space dimension must be >= 1");
    }
    if (kind != SpaceKind::euclidean && !(scale > 0.0 && std::isfinite(scale))) {
        throw InvalidInput("curvature scale must be positive and finite");
    }
}

double ModelSpace::curvature() const {
    switch (kind) {
    case SpaceKind::spherical: return 1.0 / (scale * scale);
    case SpaceKind::euclidean: return 0.0;
    case SpaceKind::hyperbolic: return -1.0 / (scale * scale);
    }
    return 0.0;
}

double ModelSpace::max_radius() const {
    return kind == SpaceKind::spherical ? kPi * scale : std::numeric_limits<double>::infinity();
}

double ModelSpace::total_volume() const {
    if (kind != SpaceKind::spherical) {
        throw InvalidInput("total volume is only finite for spherical model spaces");
    }
    return geodesic_ball_volume(*this, kPi * scale);
}

GeodesicBall::GeodesicBall(ModelSpace space_, double radius_) : space(space_), radius(radius_) {
    space.validate();
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw InvalidInput("geodesic ball radius must be positive and finite");
    }
    if (space.kind == SpaceKind::spherical && !(radius < kPi * space.scale)) {
        throw InvalidInput("geodesic ball on the sphere needs radius < pi*R");
    }
}

double GeodesicBall::volume() const { return geodesic_ball_volume(space, radius); }

double metric_coefficient(const ModelSpace& space, double t) {
    check_radius(space, t, "metric_coefficient");
    switch (space.kind) {
    case SpaceKind::spherical: return space.scale * std::sin(t / space.scale);
    case SpaceKind::euclidean: return t;
    case SpaceKind::hyperbolic: return space.scale * std::sinh(t / space.scale);
    }
    return t;
}

double metric_coefficient_derivative(const ModelSpace& space, double t) {
    switch (space.kind) {
    case SpaceKind::spherical: return std::cos(t / space.scale);
    case SpaceKind::euclidean: return 1.0;
    case SpaceKind::hyperbolic: return std::cosh(t / space.scale);
    }
    return 1.0;
}

double geodesic_sphere_area(const ModelSpace& space, double r) {
    const double s = metric_coefficient(space, r);
    return numerics::unit_sphere_measure(space.dimension) * std::pow(s, space.dimension - 1);
}

double geodesic_ball_volume(const ModelSpace& space, double r) {
    check_radius(space, r, "geodesic_ball_volume");
    const int d = space.dimension;
    const double a = space.scale;
    const double beta = numerics::unit_sphere_measure(d);
    if (space.kind == SpaceKind::euclidean) {
        return beta * std::pow(r, d) / d;
    }
    const double x = r / a;
    if (d == 1) {
        return 2.0 * r;
    }
    if (space.kind == SpaceKind::spherical) {
        if (d == 2) {
            const double half = std::sin(0.5 * x);
            return 4.0 * kPi * a * a * half * half;
        }
        if (d == 3) {
            return 2.0 * kPi * a * a * a * sin_defect(x);
        }
    } else {
        if (d == 2) {
            const double half = std::sinh(0.5 * x);
            return 4.0 * kPi * a * a * half * half;
        }
        if (d == 3) {
            return 2.0 * kPi * a * a * a * sinh_excess(x);
        }
    }
    return numerics::adaptive_simpson(
        [&space](double t) { return geodesic_sphere_area(space, t); }, 0.0, r, 1e-12);
}

double cap_radius_for_volume(const ModelSpace& space, double volume) {
    space.validate();
    if (!(volume > 0.0) || !std::isfinite(volume)) {
        throw InvalidInput("cap_radius_for_volume: volume must be positive and finite");
    }
    double hi;
    if (space.kind == SpaceKind::spherical) {
        hi = kPi * space.scale;
        const double total = geodesic_ball_volume(space, hi);
        if (!(volume < total)) {
            throw InvalidInput("cap_radius_for_volume: volume must be below the sphere's total volume");
        }
    } else {
        hi = 1.0;
        while (geodesic_ball_volume(space, hi) < volume) {
            hi *= 2.0;
            if (!std::isfinite(geodesic_ball_volume(space, hi))) {
                throw InvalidInput("cap_radius_for_volume: volume too large to bracket");
            }
        }
    }
    const auto residual = [&](double r) { return geodesic_ball_volume(space, r) - volume; };
    const auto slope = [&](double r) { return geodesic_sphere_area(space, r); };
    numerics::RootOptions options;
    options.max_iterations = 80;
    return numerics::bracketed_newton(residual, slope, 0.0, hi, options);
}

} // namespace exitmoments
