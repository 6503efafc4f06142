#include "dirireg/special_functions.hpp"

#include <cmath>

#include "dirireg/errors.hpp"

namespace dirireg {

double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
    return std::lgamma(x);
}

// Recurrence up to x >= 10, then the asymptotic expansion in 1/x^2.
// Truncation error of the series at x = 10 is below 1e-12.
double digamma(double x) {
    if (!(x > 0.0)) throw DomainError("digamma: argument must be positive");
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // psi(x) ~ ln x - 1/(2x) - sum B_2n / (2n x^{2n})
    double series = std::log(x) - 0.5 * inv;
    series -= inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    return result + series;
}

double trigamma(double x) {
    if (!(x > 0.0)) throw DomainError("trigamma: argument must be positive");
    double result = 0.0;
    while (x < 10.0) {
        result += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // psi'(x) ~ 1/x + 1/(2x^2) + sum B_2n / x^{2n+1}
    double series = inv + 0.5 * inv2;
    series += inv * inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0 - inv2 * (5.0 / 66.0)))));
    return result + series;
}

double inverse_digamma(double y) {
    // Minka's starting point, then Newton with the exact derivative.
    double x = (y >= -2.22) ? std::exp(y) + 0.5 : -1.0 / (y + 0.5772156649015329);
    for (int it = 0; it < 40; ++it) {
        const double step = (digamma(x) - y) / trigamma(x);
        x -= step;
        if (x <= 0.0) x = 1e-12;
        if (std::abs(step) < 1e-14 * (1.0 + std::abs(x))) break;
    }
    return x;
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * M_SQRT1_2);
}

double normal_two_sided_p(double z) {
    return std::erfc(std::abs(z) * M_SQRT1_2);
}

}  // namespace dirireg
