#pragma once

#include <string>

namespace exitmoments {

enum class SpaceKind { spherical, euclidean, hyperbolic };

std::string to_string(SpaceKind kind);
SpaceKind space_kind_from_string(const std::string& name);

/// Constant-curvature model geometry of dimension d.
///
/// `scale` is the sphere radius R for spherical spaces and |K|^{-1/2} for
/// hyperbolic ones; Euclidean spaces ignore it.
struct ModelSpace {
    SpaceKind kind = SpaceKind::euclidean;
    double scale = 1.0;
    int dimension = 2;

    static ModelSpace sphere(double radius, int dimension);
    static ModelSpace euclidean(int dimension);
    /// Hyperbolic space with sectional curvature `curvature` < 0.
    static ModelSpace hyperbolic(double curvature, int dimension);

    /// Throws InvalidInput when the invariants fail.
    void validate() const;

    /// Sectional curvature: 1/R², 0, or -1/scale².
    double curvature() const;

    /// Largest admissible geodesic radius: πR on spheres, +inf otherwise.
    double max_radius() const;

    /// Total volume of a spherical space (throws for other kinds).
    double total_volume() const;
};

/// A geodesic ball of radius `radius` in a model space. On spheres the
/// radius must stay below πR so the ball is a proper cap.
struct GeodesicBall {
    ModelSpace space;
    double radius = 1.0;

    GeodesicBall() = default;
    GeodesicBall(ModelSpace space, double radius);

    double volume() const;
};

/// s(t): R sin(t/R), t, or a sinh(t/a).
double metric_coefficient(const ModelSpace& space, double t);

/// d/dt s(t).
double metric_coefficient_derivative(const ModelSpace& space, double t);

/// β_{d-1} s(r)^{d-1}.
double geodesic_sphere_area(const ModelSpace& space, double r);

/// Vol(B(r)). Closed forms for d <= 3 (and any d in Euclidean space),
/// adaptive Simpson otherwise.
double geodesic_ball_volume(const ModelSpace& space, double r);

/// Inverse of geodesic_ball_volume in r.
double cap_radius_for_volume(const ModelSpace& space, double volume);

} // namespace exitmoments
