#include "exitmoments/numerics.hpp"

#include "exitmoments/errors.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace exitmoments::numerics {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    // Below this the difference is roundoff and further splitting cannot help.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(left) + std::abs(right));
    if (depth <= 0 || std::abs(delta) <= std::max(15.0 * tol, floor)) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) {
        throw InvalidInput("log_gamma: argument must be positive");
    }
    if (x < 0.5) {
        // Γ(x)Γ(1-x) = π / sin(πx)
        return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
    }
    const double z = x - 1.0;
    double series = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) {
        series += kLanczos[i] / (z + static_cast<double>(i));
    }
    const double t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(series);
}

double gamma(double x) { return std::exp(log_gamma(x)); }

double factorial(int n) {
    if (n < 0) {
        throw InvalidInput("factorial: negative argument");
    }
    double product = 1.0;
    for (int i = 2; i <= n && i <= 171; ++i) {
        product *= i;
    }
    return product;
}

double scaled_power(double c, double x, int p, int n_factorial) {
    if (c == 0.0) {
        return 0.0;
    }
    const double direct = c * std::pow(x, p) * factorial(n_factorial);
    if (std::isnormal(direct)) {
        return direct;
    }
    return std::exp(std::log(c) + p * std::log(x) + log_factorial(n_factorial));
}

double log_factorial(int n) {
    if (n < 0) {
        throw InvalidInput("log_factorial: negative argument");
    }
    if (n <= 170) {
        double product = 1.0;
        for (int i = 2; i <= n; ++i) {
            product *= i;
        }
        return std::log(product);
    }
    return log_gamma(n + 1.0);
}

double unit_sphere_measure(int d) {
    if (d < 1) {
        throw InvalidInput("unit_sphere_measure: dimension must be >= 1");
    }
    switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: break;
    }
    const double half = 0.5 * d;
    return 2.0 * std::exp(half * std::log(std::numbers::pi) - log_gamma(half));
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
    if (a == b) {
        return 0.0;
    }
    // Split once up front so symmetric integrands cannot fool the first estimate.
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double flm = f(0.5 * (a + m));
    const double frm = f(0.5 * (m + b));
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, max_depth) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, max_depth);
}

double sine_power_integral(int k) {
    if (k < 0) {
        throw InvalidInput("sine_power_integral: negative power");
    }
    if (k == 0) {
        return std::numbers::pi;
    }
    return adaptive_simpson([k](double t) { return std::pow(std::sin(t), k); }, 0.0,
                            std::numbers::pi, 1e-13);
}

double bracketed_newton(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double lo, double hi,
                        const RootOptions& options) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo > 0.0 || fhi < 0.0) {
        throw InvalidInput("bracketed_newton: root is not bracketed");
    }
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;

    const auto step_tol = [&](double x) {
        return options.x_tol > 0.0 ? options.x_tol
                                   : 4.0 * std::numeric_limits<double>::epsilon() *
                                         std::max(std::abs(x), std::numeric_limits<double>::min());
    };

    int iteration = 0;
    // Bisection until the bracket is a small fraction of its start.
    const double initial_width = hi - lo;
    while (iteration < options.max_iterations / 2 && hi - lo > 1e-6 * initial_width) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        ++iteration;
        if (fm == 0.0) return mid;
        if (fm < 0.0) lo = mid; else hi = mid;
    }

    double x = 0.5 * (lo + hi);
    while (iteration < options.max_iterations) {
        const double fx = f(x);
        ++iteration;
        if (fx == 0.0 || std::abs(fx) <= options.f_tol) return x;
        if (fx < 0.0) lo = x; else hi = x;
        const double slope = df(x);
        double next = x - fx / slope;
        if (!(slope > 0.0) || !(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - x) <= step_tol(x) || hi - lo <= step_tol(x)) {
            return next;
        }
        x = next;
    }
    throw ConvergenceError("bracketed_newton: iteration cap reached", hi - lo);
}

CompensatedSum& CompensatedSum::operator+=(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        compensation_ += (sum_ - t) + x;
    } else {
        compensation_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
}

double compensated_sum(std::span<const double> values) {
    CompensatedSum acc;
    for (double v : values) acc += v;
    return acc.value();
}

double interval_integral(std::span<const double> y, double h, std::size_t i) {
    const std::size_t n = y.size();
    const double trapezoid = 0.5 * h * (y[i] + y[i + 1]);
    if (n < 4) {
        return trapezoid;
    }
    double cubic;
    if (i == 0) {
        cubic = h / 24.0 * (9.0 * y[0] + 19.0 * y[1] - 5.0 * y[2] + y[3]);
    } else if (i + 2 == n) {
        cubic = h / 24.0 * (y[n - 4] - 5.0 * y[n - 3] + 19.0 * y[n - 2] + 9.0 * y[n - 1]);
    } else {
        cubic = h / 24.0 * (-y[i - 1] + 13.0 * y[i] + 13.0 * y[i + 1] - y[i + 2]);
    }
    if (cubic < 0.0 && y[i] >= 0.0 && y[i + 1] >= 0.0) {
        return trapezoid;
    }
    return cubic;
}

void cumulative_integral(std::span<const double> y, double h, std::span<double> out) {
    if (y.size() < 2 || out.size() != y.size()) {
        throw InvalidInput("cumulative_integral: need at least two nodes and matching output");
    }
    out[0] = 0.0;
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
        out[i + 1] = out[i] + interval_integral(y, h, i);
    }
}

} // namespace exitmoments::numerics
