#pragma once

#include "dirireg/linalg.hpp"

namespace dirireg {

/// logit(p) = ln(p / (1-p)); requires 0 < p < 1.
double logit(double p);

/// Inverse logit, computed from the sign-split form so neither tail
/// suffers cancellation or overflow for |x| up to ~745.
double inv_logit(double x);

/// ln inv_logit(x), stable for large |x|.
double log_inv_logit(double x);

/// Log link for precisions: ln(phi), phi > 0.
double log_link(double phi);

/// exp(x).
double inv_log(double x);

/// Row-wise softmax with max-subtraction; each output row sums to 1
/// exactly (renormalized after exponentiation).
Matrix softmax_rows(const Matrix& eta);

/// Inverse multivariate logit of Maier's parameterization: softmax of a
/// linear-predictor matrix whose base column (dimension 1) is all zeros.
/// Identical to softmax_rows; the base column convention is the caller's.
Matrix inverse_multivariate_logit(const Matrix& eta);

}  // namespace dirireg
