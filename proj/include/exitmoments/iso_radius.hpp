#pragma once

namespace exitmoments {

/// Hypotheses of the isoperimetric comparison: Ric >= (d-1)K on a closed
/// d-manifold of diameter `diameter`.
struct RicciBoundInput {
    double curvature = 0.0; // K
    int dimension = 2;      // d >= 2
    double diameter = 1.0;  // diam(M) > 0

    /// Throws InvalidInput on d < 2, diam <= 0, or diam > π/√K when K > 0.
    void validate() const;
};

/// Radius of the comparison sphere for the three curvature branches.
double comparison_radius(const RicciBoundInput& input);

/// The unique x > 0 with x ∫_0^z (cosh t + x sinh t)^{d-1} dt = ∫_0^π sin^{d-1}θ dθ.
double isoperimetric_constant(double z, int dimension);

/// Left side minus right side of the defining equation for C(z) at x.
double isoperimetric_residual(double x, double z, int dimension);

} // namespace exitmoments
