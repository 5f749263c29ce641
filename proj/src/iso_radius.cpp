#include "exitmoments/iso_radius.hpp"

#include "exitmoments/errors.hpp"
#include "exitmoments/numerics.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace exitmoments {

namespace {

double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
    }
    return c;
}

// (cosh t + x sinh t)^{d-1} = Σ_j C(d-1, j) x^j cosh^{d-1-j} t sinh^j t, so the
// integral is a polynomial in x whose coefficients need one quadrature each.
struct CoshSinhPolynomial {
    std::vector<double> coefficients; // coefficient of x^{j+1}
    double target = 0.0;

    CoshSinhPolynomial(double z, int d) : target(numerics::sine_power_integral(d - 1)) {
        const int power = d - 1;
        coefficients.resize(power + 1);
        for (int j = 0; j <= power; ++j) {
            const double moment = numerics::adaptive_simpson(
                [power, j](double t) {
                    return std::pow(std::cosh(t), power - j) * std::pow(std::sinh(t), j);
                },
                0.0, z, 1e-14);
            coefficients[j] = binomial(power, j) * moment;
        }
    }

    double operator()(double x) const {
        double value = 0.0;
        for (std::size_t j = coefficients.size(); j-- > 0;) {
            value = value * x + coefficients[j];
        }
        return value * x - target;
    }

    double derivative(double x) const {
        double value = 0.0;
        for (std::size_t j = coefficients.size(); j-- > 0;) {
            value = value * x + (j + 1.0) * coefficients[j];
        }
        return value;
    }
};

} // namespace

void RicciBoundInput::validate() const {
    if (dimension < 2) {
        throw InvalidInput("comparison radius needs dimension d >= 2");
    }
    if (!(diameter > 0.0) || !std::isfinite(diameter)) {
        throw InvalidInput("diameter must be positive and finite");
    }
    if (!std::isfinite(curvature)) {
        throw InvalidInput("curvature bound must be finite");
    }
    if (curvature > 0.0 && diameter > std::numbers::pi / std::sqrt(curvature) * (1.0 + 1e-14)) {
        throw InvalidInput("diameter exceeds pi/sqrt(K), impossible under Ric >= (d-1)K (Myers)");
    }
}

double isoperimetric_residual(double x, double z, int dimension) {
    return CoshSinhPolynomial(z, dimension)(x);
}

double isoperimetric_constant(double z, int dimension) {
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw InvalidInput("isoperimetric_constant: z must be positive and finite");
    }
    if (dimension < 2) {
        throw InvalidInput("isoperimetric_constant: dimension must be >= 2");
    }
    const CoshSinhPolynomial equation(z, dimension);
    const auto f = [&](double x) { return equation(x); };
    const auto df = [&](double x) { return equation.derivative(x); };

    double lo = 1e-300;
    double hi = std::max(2.0 / z, 10.0);
    while (equation(hi) <= 0.0) {
        hi *= 2.0;
    }
    numerics::RootOptions options;
    options.max_iterations = 400;
    return numerics::bracketed_newton(f, df, lo, hi, options);
}

double comparison_radius(const RicciBoundInput& input) {
    input.validate();
    const int d = input.dimension;
    const double K = input.curvature;
    const double diam = input.diameter;
    const double sine_integral = numerics::sine_power_integral(d - 1);
    if (K > 0.0) {
        const double root_k = std::sqrt(K);
        const double upper = std::min(0.5 * diam * root_k, 0.5 * std::numbers::pi);
        const double cosine_integral = numerics::adaptive_simpson(
            [d](double t) { return std::pow(std::cos(t), d - 1); }, 0.0, upper, 1e-14);
        return std::pow(2.0 * cosine_integral / sine_integral, 1.0 / d) / root_k;
    }
    if (K == 0.0) {
        return diam / (std::pow(1.0 + d * sine_integral, 1.0 / d) - 1.0);
    }
    const double root_k = std::sqrt(-K);
    return 1.0 / (root_k * isoperimetric_constant(diam * root_k, d));
}

} // namespace exitmoments
