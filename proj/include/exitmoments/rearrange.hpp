#pragma once

#include "exitmoments/model_space.hpp"
#include "exitmoments/radial_field.hpp"

#include <cstddef>
#include <vector>

namespace exitmoments {

/// Nonnegative values f(x_i) with volume weights, on a domain of volume
/// Σ w_i inside an ambient manifold of volume `ambient_volume`.
struct WeightedSample {
    std::vector<double> values;
    std::vector<double> weights;
    double domain_volume = 0.0;
    double ambient_volume = 0.0;

    /// Builds the sample with domain_volume = Σ weights (compensated).
    static WeightedSample make(std::vector<double> values, std::vector<double> weights,
                               double ambient_volume);

    void validate() const;
};

/// Exact step-function rearrangement of a WeightedSample: distinct levels in
/// decreasing order with cumulative volumes.
class Rearrangement {
public:
    explicit Rearrangement(const WeightedSample& sample);

    /// μ_f(t) = Vol{f > t}.
    double distribution(double t) const;
    /// f^#(s) = inf{t : μ_f(t) <= s}, s in [0, Vol]; f^#(Vol) is the minimum.
    double operator()(double s) const;

    double domain_volume() const { return domain_volume_; }
    const std::vector<double>& levels() const { return levels_; }
    /// cumulative()[k] = total weight of the k+1 highest levels.
    const std::vector<double>& cumulative() const { return cumulative_; }

private:
    std::vector<double> levels_;     // strictly decreasing
    std::vector<double> cumulative_; // nondecreasing, last = domain volume
    double domain_volume_ = 0.0;
};

double distribution_function(const WeightedSample& sample, double t);
double decreasing_rearrangement(const WeightedSample& sample, double s);

/// f*(r_j) = f^#((Vol(M)/Vol(S)) Vol(B(r_j))) on an n_radii-node uniform grid
/// over the target cap. The target must satisfy the volume normalization
/// Vol(target)/Vol(S) = Vol(Ω)/Vol(M) to 1e-8 relative.
RadialField spherical_symmetrization(const WeightedSample& sample, const GeodesicBall& target,
                                     std::size_t n_radii);

/// (1/Vol) Σ w f^p.
double lp_mean(const WeightedSample& sample, double p);
/// (1/Vol(B)) ∫_B f^p dV on the field's ball.
double lp_mean(const RadialField& field, double p);

} // namespace exitmoments
