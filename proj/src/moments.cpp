#include "exitmoments/moments.hpp"

#include "exitmoments/errors.hpp"
#include "exitmoments/numerics.hpp"

#include <cmath>
#include <string>

namespace exitmoments {

double MomentSequence::operator[](int n) const {
    if (n < 1 || n > static_cast<int>(moments.size())) {
        throw InvalidInput("moment index " + std::to_string(n) + " out of range");
    }
    return moments[static_cast<std::size_t>(n - 1)];
}

double MomentSequence::scaled(int n) const {
    const double t = (*this)[n];
    const double direct = t / numerics::factorial(n);
    return std::isnormal(direct) ? direct : std::exp(std::log(t) - numerics::log_factorial(n));
}

void MomentSequence::validate() const {
    if (!(volume > 0.0) || !std::isfinite(volume)) {
        throw InvalidInput("moment sequence volume must be positive");
    }
    if (moments.empty()) {
        throw InvalidInput("moment sequence is empty");
    }
    for (double t : moments) {
        if (!(t > 0.0) || !std::isfinite(t)) {
            throw InvalidInput("moments must be positive and finite");
        }
    }
}

double SpectralData::partition_sum() const {
    numerics::CompensatedSum sum;
    for (const auto& p : pairs) sum += p.a_sq;
    return sum.value();
}

void SpectralData::validate(double rel_tol) const {
    if (!(volume > 0.0) || !std::isfinite(volume)) {
        throw InvalidInput("spectral data volume must be positive");
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (!(pairs[i].nu > 0.0) || !(pairs[i].a_sq > 0.0)) {
            throw InvalidInput("spectral pairs need nu > 0 and a_sq > 0");
        }
        if (i > 0 && !(pairs[i].nu > pairs[i - 1].nu)) {
            throw InvalidInput("spectral pairs must have strictly increasing nu");
        }
    }
    if (partition_sum() > volume * (1.0 + rel_tol)) {
        throw InvalidInput("sum of a_sq exceeds the domain volume");
    }
}

} // namespace exitmoments
