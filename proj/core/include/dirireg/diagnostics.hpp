#pragma once

#include <vector>

#include "dirireg/linalg.hpp"

namespace dirireg {

/// Type-7 (linear interpolation) sample quantile; q in [0,1].
double quantile(std::vector<double> draws, double q);

/// Equal-tailed interval from pooled draws.
struct Interval {
    double lower;
    double upper;
};
Interval equal_tailed_interval(const std::vector<double>& draws, double level = 0.95);

/// Doubled posterior tail probability: 2 * min(Pr(>0), Pr(<0)).
double bayesian_p_value(const std::vector<double>& draws);

/// Potential scale reduction from between/within-chain variances
/// (Gelman-Rubin). A single chain is split in half.
double r_hat(const std::vector<std::vector<double>>& chains);

/// Effective sample size across chains via the initial monotone positive
/// sequence estimator on averaged autocorrelations.
double effective_sample_size(const std::vector<std::vector<double>>& chains);

}  // namespace dirireg
