#pragma once

#include "dirireg/dataset.hpp"
#include "dirireg/linalg.hpp"

namespace dirireg {

/// Per-dimension linear model on the logit scale. Ignores the multivariate
/// structure; kept as a descriptive reference analysis. Intervals are
/// normal-theory on the logit scale, back-transformed, so the per-row
/// fitted means do not sum to one.
struct LogitLinearFit {
    Matrix beta;        // Q x P, one univariate fit per dimension
    Matrix fitted;      // n x P back-transformed means
    Matrix lower;       // n x P
    Matrix upper;       // n x P
    Vector sigma;       // residual sd per dimension
};

LogitLinearFit fit_logit_lm(const CompositionDataset& dataset, double level = 0.95);

/// Per-dimension random-intercept model on the logit scale, fitted by
/// profile maximum likelihood over the variance ratio. Accounts for the
/// grouping factor but not the multivariate structure.
struct LogitMixedFit {
    Matrix beta;      // Q x P fixed effects
    Vector sigma_u;   // P random-intercept sds
    Vector sigma;     // P residual sds
    Matrix fitted;    // n x P back-transformed fixed-effect means
    Matrix lower;     // n x P
    Matrix upper;     // n x P
};

LogitMixedFit fit_logit_lmm(const CompositionDataset& dataset, double level = 0.95);

}  // namespace dirireg
