#pragma once

#include "exitmoments/moments.hpp"

#include <string>
#include <vector>

namespace exitmoments {

/// T_n = n! Σ a² ν^{−n} together with the truncation bound
/// 0 ≤ T_n(true) − T_n ≤ n! (Vol − Σa²) ν_last^{−n}.
struct TruncatedMoments {
    MomentSequence moments;
    std::vector<double> tail_bound; // tail_bound[n-1] bounds the omitted part of T_n
};

TruncatedMoments moments_from_spectrum(const SpectralData& spectrum, int n_moments);

/// H(t) = Σ a² e^{−νt}.
double heat_content(const SpectralData& spectrum, double t);

/// Vol − Σ a².
double volume_partition_defect(const SpectralData& spectrum);

struct RecoveryOptions {
    /// Relative uncertainty of each input T_n. The working floor is the larger
    /// of this and the level revealed by ratio-monotonicity violations.
    double input_rel_noise = 1e-15;
    /// A residual is usable only where it exceeds this multiple of its noise floor.
    double floor_factor = 10.0;
};

struct RecoveredPair {
    double nu = 0.0;
    double a_sq = 0.0;
    double nu_error = 0.0;   // |difference of the last two extrapolants|
    double a_sq_error = 0.0;
    int window = 0;          // largest n used
};

enum class RecoveryStop { max_pairs, noise_floor };

struct RecoveryResult {
    SpectralData spectral;
    std::vector<RecoveredPair> pairs;
    RecoveryStop stop = RecoveryStop::max_pairs;
    std::string stop_reason;
    double noise_level = 0.0; // relative input noise actually used
};

/// Peels (ν_k, a²_k) off the moment sequence from the largest usable n down:
/// ratio estimator q_n/q_{n+1} → ν plus one Aitken step, a² = ν^n q_n
/// (also Aitken-accelerated), then subtraction and repeat. Stops when the
/// peeled residual sinks into its noise floor.
RecoveryResult recover_spectrum(const MomentSequence& moments, int max_pairs,
                                const RecoveryOptions& options = {});

struct EigenBoundReport {
    int n = 0;
    int k = 0;
    double bound = 0.0;
    bool vacuous = false;
    double numerator = 0.0;   // T_{2k−1}/(2k−1)! − Σ a² ν^{−(2k−1)}
    double denominator = 0.0; // T_{2k}/(2k)! − Σ a² ν^{−2k}
    double noise_floor = 0.0; // below this a difference is indistinguishable from zero
    std::string route;        // "moments" or "spectral_tail"
    std::vector<SpectralPair> subtracted_terms;
};

/// Upper bound for λ_n from the moments, subtracting the supplied pairs
/// (those of spec*(Ω) below λ_n). `input_rel_noise` is the relative
/// uncertainty of the T_n.
EigenBoundReport eigenvalue_bound(const MomentSequence& moments, const SpectralData& known_below,
                                  int n, int k, double input_rel_noise = 1e-15);

/// The same bound evaluated from spectral tail sums: pairs with ν < nu_cutoff
/// are the subtracted ones, the rest form the numerator and denominator
/// directly. No cancellation, so the k → ∞ limit stays visible.
EigenBoundReport eigenvalue_bound_tail(const SpectralData& spectrum, int n, int k,
                                       double nu_cutoff);

} // namespace exitmoments
