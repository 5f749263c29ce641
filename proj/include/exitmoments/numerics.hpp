#pragma once

#include <functional>
#include <span>

namespace exitmoments::numerics {

/// log Γ(x) for x > 0 (Lanczos, g = 7, nine coefficients; ~1e-15 relative).
double log_gamma(double x);

/// Γ(x) for x > 0.
double gamma(double x);

/// log(n!) via log_gamma.
double log_factorial(int n);

/// n! as a running product (exact through 22!, +inf beyond 170!).
double factorial(int n);

/// c · x^p · n!, directly when representable, otherwise through logarithms.
double scaled_power(double c, double x, int p, int n_factorial = 0);

/// Measure of the unit (d-1)-sphere in R^d: 2π^{d/2}/Γ(d/2). β_0 = 2.
double unit_sphere_measure(int d);

/// Adaptive Simpson quadrature of f on [a, b] to an absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-12, int max_depth = 48);

/// ∫_0^π sin^{k}θ dθ by adaptive Simpson.
double sine_power_integral(int k);

struct RootOptions {
    double x_tol = 0.0;      // absolute step tolerance; 0 means a few ulps of x
    double f_tol = 0.0;      // stop when |f| <= f_tol
    int max_iterations = 80; // total (bisection + Newton)
};

/// Root of an increasing function f on [lo, hi] with f(lo) < 0 < f(hi).
/// Bisection narrows the bracket, then safeguarded Newton steps polish.
/// Throws ConvergenceError when the iteration budget runs out.
double bracketed_newton(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double lo, double hi,
                        const RootOptions& options = {});

/// Neumaier-compensated summation.
class CompensatedSum {
public:
    CompensatedSum& operator+=(double x);
    double value() const { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

double compensated_sum(std::span<const double> values);

/// Running integrals ∫_{x_0}^{x_i} y on a uniform grid with spacing h.
/// Uses the four-point cubic rule per interval (one-sided at the ends),
/// falling back to the trapezoid on any interval where a nonnegative
/// integrand would give a negative increment. Needs at least two nodes;
/// with fewer than four nodes it is the trapezoid rule.
void cumulative_integral(std::span<const double> y, double h, std::span<double> out);

/// Increment ∫ over interval [i, i+1] with the same rule as cumulative_integral.
double interval_integral(std::span<const double> y, double h, std::size_t i);

} // namespace exitmoments::numerics
