#pragma once

#include <cstddef>
#include <vector>

namespace exitmoments {

/// {Vol(Ω), T_1..T_N}: integrals of the exit-time moments E^x[τ^n] over Ω.
struct MomentSequence {
    double volume = 0.0;
    std::vector<double> moments; // moments[n-1] = T_n

    std::size_t size() const { return moments.size(); }
    /// T_n for 1 <= n <= N.
    double operator[](int n) const;
    /// T_n / n!, evaluated through log-factorials.
    double scaled(int n) const;

    /// Throws InvalidInput unless volume > 0 and every T_n is positive and finite.
    void validate() const;
};

struct SpectralPair {
    double nu = 0.0;   // eigenvalue in spec*(Ω)
    double a_sq = 0.0; // squared norm of the projection of 1 onto its eigenspace
};

/// The part of the Dirichlet spectrum that sees the constant function.
struct SpectralData {
    double volume = 0.0;
    std::vector<SpectralPair> pairs; // ν strictly increasing, a² > 0

    double partition_sum() const;
    /// Throws InvalidInput on ordering, positivity, or Σ a² > volume (beyond rel_tol).
    void validate(double rel_tol = 1e-9) const;
};

} // namespace exitmoments
