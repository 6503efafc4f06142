#pragma once

namespace dirireg {

/// Natural log of the gamma function, x > 0.
double log_gamma(double x);

/// Digamma psi(x) for x > 0; absolute error below 1e-10.
double digamma(double x);

/// Trigamma psi'(x) for x > 0; absolute error below 1e-10.
double trigamma(double x);

/// Solves psi(x) = y for x > 0 by Newton iteration.
double inverse_digamma(double y);

/// Standard normal CDF.
double normal_cdf(double z);

/// Two-sided tail probability of |Z| >= |z| under the standard normal.
double normal_two_sided_p(double z);

}  // namespace dirireg
