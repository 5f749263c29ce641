#include "exitmoments/spectral.hpp"

#include "exitmoments/errors.hpp"
#include "exitmoments/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace exitmoments {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_spectrum(const SpectralData& spectrum) {
    if (!(spectrum.volume > 0.0) || !std::isfinite(spectrum.volume)) {
        throw InvalidInput("spectral data needs a positive volume");
    }
    for (const auto& p : spectrum.pairs) {
        if (!(p.nu > 0.0) || !(p.a_sq > 0.0) || !std::isfinite(p.nu) || !std::isfinite(p.a_sq)) {
            throw InvalidInput("spectral pairs need positive finite nu and a_sq");
        }
    }
}

// One Aitken Δ² step on s[i-2], s[i-1], s[i]; falls back to s[i] when the
// second difference vanishes.
double aitken(const std::vector<double>& s, std::size_t i) {
    const double d1 = s[i] - s[i - 1];
    const double d2 = s[i] - 2.0 * s[i - 1] + s[i - 2];
    if (d2 == 0.0 || !std::isfinite(d2)) {
        return s[i];
    }
    const double a = s[i] - d1 * d1 / d2;
    return std::isfinite(a) ? a : s[i];
}

} // namespace

TruncatedMoments moments_from_spectrum(const SpectralData& spectrum, int n_moments) {
    check_spectrum(spectrum);
    if (spectrum.pairs.empty()) {
        throw InvalidInput("moments_from_spectrum needs at least one pair");
    }
    if (n_moments < 1) {
        throw InvalidInput("moments_from_spectrum needs N >= 1");
    }
    TruncatedMoments out;
    out.moments.volume = spectrum.volume;
    const double defect = std::max(volume_partition_defect(spectrum), 0.0);
    const double nu_last = spectrum.pairs.back().nu;
    for (int n = 1; n <= n_moments; ++n) {
        numerics::CompensatedSum sum;
        for (const auto& p : spectrum.pairs) {
            sum += numerics::scaled_power(p.a_sq, p.nu, -n, n);
        }
        out.moments.moments.push_back(sum.value());
        out.tail_bound.push_back(defect > 0.0 ? numerics::scaled_power(defect, nu_last, -n, n) : 0.0);
    }
    return out;
}

double heat_content(const SpectralData& spectrum, double t) {
    check_spectrum(spectrum);
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw InvalidInput("heat_content needs t > 0");
    }
    numerics::CompensatedSum sum;
    for (const auto& p : spectrum.pairs) {
        sum += p.a_sq * std::exp(-p.nu * t);
    }
    return sum.value();
}

double volume_partition_defect(const SpectralData& spectrum) {
    numerics::CompensatedSum sum;
    sum += spectrum.volume;
    for (const auto& p : spectrum.pairs) {
        sum += -p.a_sq;
    }
    return sum.value();
}

RecoveryResult recover_spectrum(const MomentSequence& moments, int max_pairs,
                                const RecoveryOptions& options) {
    moments.validate();
    const int big_n = static_cast<int>(moments.size());
    if (big_n < 8) {
        throw InvalidInput("recover_spectrum needs at least 8 moments");
    }
    if (max_pairs < 1) {
        throw InvalidInput("recover_spectrum needs max_pairs >= 1");
    }
    if (!(options.input_rel_noise >= 0.0) || !(options.floor_factor >= 1.0)) {
        throw InvalidInput("recovery noise level must be >= 0 and floor factor >= 1");
    }

    // q_n = T_n/n!, rescaled by s^n (s ≈ ν_1) so that late terms stay O(1).
    std::vector<double> q(big_n + 1, 0.0);
    for (int n = 1; n <= big_n; ++n) {
        q[n] = moments.scaled(n);
    }
    const double s = q[big_n - 1] / q[big_n];
    for (int n = 1; n <= big_n; ++n) {
        q[n] = numerics::scaled_power(moments.scaled(n), s, n);
    }

    // For a positive Dirichlet series the ratios q_n/q_{n+1} never increase;
    // an increase can only come from input noise of at least a quarter of it.
    double violation = 0.0;
    for (int n = 1; n + 2 <= big_n; ++n) {
        const double r0 = q[n] / q[n + 1];
        const double r1 = q[n + 1] / q[n + 2];
        violation = std::max(violation, (r1 - r0) / r0);
    }
    const double noise = std::max({options.input_rel_noise, 4.0 * kEps, 0.25 * violation});

    RecoveryResult result;
    result.noise_level = noise;
    result.spectral.volume = moments.volume;

    std::vector<double> r = q;
    std::vector<double> sigma(big_n + 1);
    for (int n = 1; n <= big_n; ++n) {
        sigma[n] = noise * q[n];
    }

    while (static_cast<int>(result.pairs.size()) < max_pairs) {
        // Usable window: residual clears its floor, and its ratios still decrease.
        int hi = 0;
        while (hi < big_n && r[hi + 1] > options.floor_factor * sigma[hi + 1]) {
            ++hi;
        }
        std::vector<double> rho(hi + 1, 0.0);
        for (int n = 1; n < hi; ++n) {
            rho[n] = r[n] / r[n + 1];
            if (n >= 2) {
                const double band = 4.0 * (sigma[n] / r[n] + sigma[n + 1] / r[n + 1]);
                if (rho[n] > rho[n - 1] * (1.0 + band)) {
                    hi = n;
                    break;
                }
            }
        }
        if (hi < 5) {
            result.stop = RecoveryStop::noise_floor;
            result.stop_reason = "residual moment series reached the noise floor after " +
                                 std::to_string(result.pairs.size()) + " pair(s)";
            break;
        }

        // Extrapolation index m: Aitken on ρ_{m−2..m} (uses r up to m+1). Take the m
        // minimizing extrapolant spread plus the noise the ratios carry there.
        const auto carried = [&](int n) { return 2.0 * (sigma[n] / r[n] + sigma[n + 1] / r[n + 1]); };
        int best = hi - 1;
        double best_err = std::numeric_limits<double>::infinity();
        for (int m = 4; m <= hi - 1; ++m) {
            const double a = aitken(rho, m);
            const double err = std::abs(a - aitken(rho, m - 1)) / std::abs(a) + carried(m);
            if (err < best_err) {
                best_err = err;
                best = m;
            }
        }
        const double nu_a = aitken(rho, best);
        const double rel_nu = best_err;
        std::vector<double> alpha(best + 2, 0.0);
        for (int n = 1; n <= best + 1; ++n) {
            alpha[n] = r[n] * std::pow(nu_a, n);
        }
        const double a_a = aitken(alpha, best + 1);
        const double a_b = aitken(alpha, best);

        RecoveredPair pair;
        pair.nu = nu_a * s;
        pair.nu_error = rel_nu * std::abs(nu_a) * s;
        pair.a_sq = a_a;
        pair.a_sq_error =
            std::abs(a_a - a_b) + ((best + 1) * rel_nu + carried(best)) * std::abs(a_a);
        pair.window = best + 1;

        const bool increasing = result.pairs.empty() || pair.nu > result.pairs.back().nu;
        if (!(nu_a > 0.0) || !(a_a > 0.0) || !std::isfinite(nu_a) || !std::isfinite(a_a) ||
            !increasing) {
            result.stop = RecoveryStop::noise_floor;
            result.stop_reason = "extrapolation lost consistency after " +
                                 std::to_string(result.pairs.size()) + " pair(s)";
            break;
        }

        const double rel_a = pair.a_sq_error / a_a;
        for (int n = 1; n <= big_n; ++n) {
            const double term = a_a * std::pow(nu_a, -n);
            r[n] -= term;
            sigma[n] += term * (rel_a + n * rel_nu) + kEps * term;
        }
        result.pairs.push_back(pair);
        result.spectral.pairs.push_back({pair.nu, pair.a_sq});
    }
    if (result.stop == RecoveryStop::max_pairs) {
        result.stop_reason = "requested number of pairs recovered";
    }
    return result;
}

EigenBoundReport eigenvalue_bound(const MomentSequence& moments, const SpectralData& known_below,
                                  int n, int k, double input_rel_noise) {
    moments.validate();
    if (n < 1 || k < 1) {
        throw InvalidInput("eigenvalue_bound needs n >= 1 and k >= 1");
    }
    if (2 * k > static_cast<int>(moments.size())) {
        throw InvalidInput("eigenvalue_bound at order k needs T_1..T_{2k}");
    }
    for (const auto& p : known_below.pairs) {
        if (!(p.nu > 0.0) || !(p.a_sq > 0.0)) {
            throw InvalidInput("subtracted pairs need positive nu and a_sq");
        }
    }
    EigenBoundReport report;
    report.n = n;
    report.k = k;
    report.route = "moments";
    report.subtracted_terms = known_below.pairs;

    const auto bracket = [&](int order, double& floor) {
        const double q = moments.scaled(order);
        numerics::CompensatedSum sum;
        sum += q;
        double magnitude = q;
        for (const auto& p : known_below.pairs) {
            const double term = numerics::scaled_power(p.a_sq, p.nu, -order);
            sum += -term;
            magnitude += term;
        }
        floor = 10.0 * (std::max(input_rel_noise, 0.0) * q + 4.0 * kEps * magnitude);
        return sum.value();
    };
    double floor_num = 0.0;
    double floor_den = 0.0;
    report.numerator = bracket(2 * k - 1, floor_num);
    report.denominator = bracket(2 * k, floor_den);
    report.noise_floor = floor_den;
    if (report.numerator <= floor_num || report.denominator <= floor_den) {
        report.vacuous = true;
        report.bound = std::numeric_limits<double>::infinity();
    } else {
        report.bound = report.numerator / report.denominator;
    }
    return report;
}

EigenBoundReport eigenvalue_bound_tail(const SpectralData& spectrum, int n, int k,
                                       double nu_cutoff) {
    check_spectrum(spectrum);
    if (n < 1 || k < 1) {
        throw InvalidInput("eigenvalue_bound needs n >= 1 and k >= 1");
    }
    EigenBoundReport report;
    report.n = n;
    report.k = k;
    report.route = "spectral_tail";

    double nu_ref = 0.0;
    numerics::CompensatedSum num;
    numerics::CompensatedSum den;
    for (const auto& p : spectrum.pairs) {
        if (p.nu < nu_cutoff) {
            report.subtracted_terms.push_back(p);
            continue;
        }
        if (nu_ref == 0.0) {
            nu_ref = p.nu;
        }
        // Scaled by ν_ref^{2k} to stay clear of underflow.
        const double ratio = nu_ref / p.nu;
        num += p.a_sq * std::pow(ratio, 2 * k - 1);
        den += p.a_sq * std::pow(ratio, 2 * k);
    }
    if (nu_ref == 0.0) {
        report.vacuous = true;
        report.bound = std::numeric_limits<double>::infinity();
        return report;
    }
    report.numerator = numerics::scaled_power(num.value(), nu_ref, -(2 * k - 1));
    report.denominator = numerics::scaled_power(den.value(), nu_ref, -2 * k);
    report.noise_floor = 4.0 * kEps * report.denominator;
    report.bound = nu_ref * num.value() / den.value();
    return report;
}

} // namespace exitmoments
