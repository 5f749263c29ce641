#include "exitmoments/rearrange.hpp"

#include "exitmoments/errors.hpp"
#include "exitmoments/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace exitmoments {

WeightedSample WeightedSample::make(std::vector<double> values, std::vector<double> weights,
                                    double ambient_volume) {
    WeightedSample sample;
    sample.values = std::move(values);
    sample.weights = std::move(weights);
    sample.domain_volume = numerics::compensated_sum(sample.weights);
    sample.ambient_volume = ambient_volume;
    sample.validate();
    return sample;
}

void WeightedSample::validate() const {
    if (values.empty() || values.size() != weights.size()) {
        throw InvalidInput("weighted sample needs matching, nonempty values and weights");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0) {
            throw InvalidInput("weighted sample values must be finite and nonnegative");
        }
        if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
            throw InvalidInput("weighted sample weights must be positive");
        }
    }
    const double total = numerics::compensated_sum(weights);
    if (std::abs(total - domain_volume) > 1e-10 * domain_volume) {
        throw InvalidInput("weights do not sum to the domain volume");
    }
    if (!(domain_volume <= ambient_volume * (1.0 + 1e-12))) {
        throw InvalidInput("domain volume exceeds the ambient volume");
    }
}

Rearrangement::Rearrangement(const WeightedSample& sample) {
    sample.validate();
    std::vector<std::size_t> order(sample.values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return sample.values[a] > sample.values[b];
    });
    numerics::CompensatedSum running;
    for (std::size_t idx : order) {
        const double v = sample.values[idx];
        running += sample.weights[idx];
        if (levels_.empty() || v != levels_.back()) {
            levels_.push_back(v);
            cumulative_.push_back(running.value());
        } else {
            cumulative_.back() = running.value();
        }
    }
    domain_volume_ = sample.domain_volume;
    cumulative_.back() = domain_volume_;
}

double Rearrangement::distribution(double t) const {
    // Number of levels strictly above t; levels_ is decreasing.
    const auto it = std::partition_point(levels_.begin(), levels_.end(),
                                         [t](double level) { return level > t; });
    const auto k = static_cast<std::size_t>(it - levels_.begin());
    return k == 0 ? 0.0 : cumulative_[k - 1];
}

double Rearrangement::operator()(double s) const {
    if (!(s >= 0.0) || s > domain_volume_ * (1.0 + 1e-12)) {
        throw InvalidInput("decreasing rearrangement evaluated outside [0, Vol]");
    }
    // First level whose cumulative volume exceeds s.
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    if (it == cumulative_.end()) return levels_.back();
    return levels_[static_cast<std::size_t>(it - cumulative_.begin())];
}

double distribution_function(const WeightedSample& sample, double t) {
    return Rearrangement(sample).distribution(t);
}

double decreasing_rearrangement(const WeightedSample& sample, double s) {
    return Rearrangement(sample)(s);
}

RadialField spherical_symmetrization(const WeightedSample& sample, const GeodesicBall& target,
                                     std::size_t n_radii) {
    if (target.space.kind != SpaceKind::spherical) {
        throw InvalidInput("spherical symmetrization needs a cap on a model sphere");
    }
    if (n_radii < 2) {
        throw InvalidInput("spherical symmetrization needs at least two radii");
    }
    sample.validate();
    const double sphere_volume = target.space.total_volume();
    const double target_fraction = target.volume() / sphere_volume;
    const double domain_fraction = sample.domain_volume / sample.ambient_volume;
    if (std::abs(target_fraction - domain_fraction) > 1e-8 * domain_fraction) {
        throw InvalidInput("target cap does not satisfy the volume normalization; build it with "
                           "symmetrized_ball");
    }
    const Rearrangement rearranged(sample);
    const double scale = sample.ambient_volume / sphere_volume;
    const double vol = rearranged.domain_volume();
    RadialField field = RadialField::sampled(target.space, target.radius, n_radii, [&](double r) {
        const double s = scale * geodesic_ball_volume(target.space, r);
        return rearranged(std::clamp(s, 0.0, vol));
    });
    // Enforce the exact monotone contract against roundoff in the volume map.
    for (std::size_t i = 1; i < field.values.size(); ++i) {
        field.values[i] = std::min(field.values[i], field.values[i - 1]);
    }
    return field;
}

double lp_mean(const WeightedSample& sample, double p) {
    if (!(p >= 1.0)) throw InvalidInput("lp_mean needs p >= 1");
    sample.validate();
    numerics::CompensatedSum sum;
    for (std::size_t i = 0; i < sample.values.size(); ++i) {
        sum += sample.weights[i] * std::pow(sample.values[i], p);
    }
    return sum.value() / sample.domain_volume;
}

double lp_mean(const RadialField& field, double p) {
    if (!(p >= 1.0)) throw InvalidInput("lp_mean needs p >= 1");
    RadialField powered = field;
    for (double& v : powered.values) v = std::pow(std::abs(v), p);
    const double volume = geodesic_ball_volume(field.space, field.outer_radius());
    return radial_integral(powered) / volume;
}

} // namespace exitmoments
