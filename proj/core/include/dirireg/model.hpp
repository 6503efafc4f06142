#pragma once

#include <optional>

#include "dirireg/dataset.hpp"
#include "dirireg/linalg.hpp"

namespace dirireg {

/// Priors and structural switches of the hierarchical model.
struct ModelConfig {
    double prior_beta_variance = 10000.0;  // N(0, v) on every beta entry
    double xi_prior_mean = -1.0;           // Exp mean for the sum-to-one penalty precision;
                                           // negative means "use 1000/P"
    double xi_star_prior_mean = -1.0;      // Exp mean for the coupling precision; default 100/P
    bool random_effects = false;
    double sigma_u_prior_mean = 1.0;       // Exp mean on each random-effect scale

    double xi_mean(Index P) const { return xi_prior_mean > 0 ? xi_prior_mean : 1000.0 / static_cast<double>(P); }
    double xi_star_mean(Index P) const { return xi_star_prior_mean > 0 ? xi_star_prior_mean : 100.0 / static_cast<double>(P); }
    double xi_rate(Index P) const { return 1.0 / xi_mean(P); }
    double xi_star_rate(Index P) const { return 1.0 / xi_star_mean(P); }
};

/// Regression coefficients, with optional per-group random intercepts.
struct CoefficientSet {
    Matrix beta;      // Q x P, one column per response dimension
    Vector beta_phi;  // R
    std::optional<Matrix> u;        // G x P random intercepts
    std::optional<Vector> sigma_u;  // P positive scales
};

/// Latent log-concentrations plus the two penalty precisions.
struct LatentState {
    Matrix log_alpha;  // n x P
    double xi = 0.0;
    double xi_star = 0.0;
};

/// Raw means mu_ij = inv_logit(x_i beta_j [+ u_{g(i),j}]). Rows are not
/// forced to sum to one; the soft constraint handles that.
Matrix mean_surface(const Matrix& X, const Matrix& beta,
                    const std::optional<Matrix>& u = std::nullopt,
                    const std::optional<std::vector<int>>& group = std::nullopt);

/// phi_i = exp(w_i beta_phi).
Vector precision_surface(const Matrix& W, const Vector& beta_phi);

/// Joint log density of data, latents and priors for the penalized
/// hierarchy; the sampler's target.
double log_penalized_posterior(const CompositionDataset& dataset, const CoefficientSet& coeffs,
                               const LatentState& latent, const ModelConfig& config);

/// Analytic gradient of log_penalized_posterior with respect to the
/// regression parameters, flattened as (beta column-major, beta_phi,
/// then u column-major when present).
Vector log_penalized_posterior_grad_regression(const CompositionDataset& dataset,
                                               const CoefficientSet& coeffs,
                                               const LatentState& latent,
                                               const ModelConfig& config);

struct CorrectedDraw {
    Matrix mu_adj;     // rows sum to one exactly
    Matrix alpha_adj;  // mu_adj scaled by phi per row
};

/// Post-simulation corrections: renormalize each mean row and rescale by
/// the drawn precision.
CorrectedDraw apply_corrections(const Matrix& mu_draw, const Vector& phi_draw);

}  // namespace dirireg
