#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dirireg/dataset.hpp"
#include "dirireg/linalg.hpp"

namespace dirireg {

/// Maximum-likelihood fit in the alternative (mean/precision)
/// parameterization: multivariate-logit mean model with a base dimension,
/// log-link precision model.
struct MLFit {
    Index base_dim = 0;  // coefficients for this dimension are fixed at zero
    Matrix beta;         // Q x P with the base column identically zero
    Vector beta_phi;     // R
    Matrix mu_hat;       // n x P fitted means
    Vector phi_hat;      // n fitted precisions
    double log_likelihood = 0.0;

    /// Free parameters in optimizer order: beta columns j != base_dim
    /// (column-major), then beta_phi.
    std::vector<std::string> param_names;
    Vector estimates;
    Matrix covariance;  // empty when the Hessian was not usable
    Vector se;          // NaN entries when unavailable
    Vector wald_p;      // NaN entries when unavailable
    bool inference_available = false;
    std::vector<std::string> warnings;
    std::size_t iterations = 0;
};

struct MLOptions {
    double grad_tol = 1e-7;
    std::size_t max_iterations = 500;
    int extra_restarts = 2;       // random perturbations of the moments start
    std::uint64_t restart_seed = 0x5eed;
    Index base_dim = 0;
};

/// Fits the regression by quasi-Newton ascent with the analytic gradient;
/// standard errors from a central-difference Hessian at the optimum.
MLFit fit_ml_regression(const CompositionDataset& dataset, const MLOptions& options = {});

/// Two-sided p-values from z = estimate / se against the standard normal.
Vector wald_test(const MLFit& fit);

/// Log-likelihood and gradient of the free-parameter vector; exposed for
/// verification against finite differences.
double ml_log_likelihood(const CompositionDataset& dataset, const Vector& theta, Index base_dim,
                         Vector* grad = nullptr);

/// Delta-method (Wald) intervals for every fitted mean.
struct MuIntervals {
    Matrix lower, upper;  // n x P
};
MuIntervals ml_mu_intervals(const MLFit& fit, const CompositionDataset& dataset,
                            double level = 0.95);

/// Plug-in predictive intervals: Dirichlet draws at the fitted alpha.
MuIntervals ml_plug_in_predictive(const MLFit& fit, std::size_t n_draws = 2000,
                                  std::uint64_t seed = 7, double level = 0.95);

}  // namespace dirireg
