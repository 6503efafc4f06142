#pragma once

#include "dirireg/linalg.hpp"

namespace dirireg {

/// Fit-quality summary for one fitted model against a known truth.
struct FitStatistics {
    double sce = 0.0;                  // sum of compositional errors
    double coverage = 0.0;             // fraction of true means inside intervals
    double std_width = 0.0;            // mean interval width / true mean
    double predictive_coverage = 0.0;  // held-out components inside predictive intervals
};

/// Aitchison distance: Euclidean distance between centered log-ratio
/// transforms. Both arguments must be strictly positive; closure is not
/// required (the clr is scale invariant).
double aitchison_distance(const Vector& a, const Vector& b);

/// Centered log-ratio transform of a positive vector.
Vector clr(const Vector& x);

/// Sum of per-row Aitchison distances between two composition matrices.
double sce(const Matrix& estimated, const Matrix& target);

struct CoverageWidth {
    double coverage;
    double std_width;
};

/// Elementwise interval coverage of `truth` and mean width standardized by
/// `expected` (the true mean surface in simulations).
CoverageWidth coverage_and_width(const Matrix& lower, const Matrix& upper, const Matrix& truth,
                                 const Matrix& expected);

}  // namespace dirireg
