#include "dirireg/model.hpp"

#include <cmath>

#include "dirireg/errors.hpp"
#include "dirireg/links.hpp"
#include "dirireg/special_functions.hpp"

namespace dirireg {

namespace {

constexpr double kLog2Pi = 1.8378770664093455;

void check_shapes(const CompositionDataset& ds, const CoefficientSet& c,
                  const LatentState& l, const ModelConfig& config) {
    if (c.beta.rows() != ds.X.cols() || c.beta.cols() != ds.Y.cols()) {
        throw DimensionError("beta shape does not match design/responses");
    }
    if (c.beta_phi.size() != ds.W.cols()) {
        throw DimensionError("beta_phi length does not match precision design");
    }
    if (l.log_alpha.rows() != ds.n_obs() || l.log_alpha.cols() != ds.n_dim()) {
        throw DimensionError("log_alpha shape does not match responses");
    }
    if (!(l.xi > 0.0) || !(l.xi_star > 0.0)) {
        throw DomainError("latent penalty precisions must be positive");
    }
    if (config.random_effects) {
        if (!ds.group) throw InitializationError("random effects requested but dataset has no group labels");
        if (!c.u || !c.sigma_u) throw DimensionError("random effects enabled but u/sigma_u missing");
        if (c.u->rows() != ds.n_groups() || c.u->cols() != ds.n_dim()) {
            throw DimensionError("u shape does not match groups/responses");
        }
        if (c.sigma_u->size() != ds.n_dim()) throw DimensionError("sigma_u length mismatch");
        for (Index j = 0; j < c.sigma_u->size(); ++j) {
            if (!((*c.sigma_u)(j) > 0.0)) throw DomainError("sigma_u must be positive");
        }
    }
}

}  // namespace

Matrix mean_surface(const Matrix& X, const Matrix& beta, const std::optional<Matrix>& u,
                    const std::optional<std::vector<int>>& group) {
    if (X.cols() != beta.rows()) throw DimensionError("mean_surface: X/beta shapes do not conform");
    Matrix eta = X * beta;
    if (u && group) {
        for (Index i = 0; i < eta.rows(); ++i) {
            eta.row(i) += u->row((*group)[static_cast<std::size_t>(i)]);
        }
    }
    Matrix mu(eta.rows(), eta.cols());
    for (Index i = 0; i < eta.rows(); ++i) {
        for (Index j = 0; j < eta.cols(); ++j) mu(i, j) = inv_logit(eta(i, j));
    }
    return mu;
}

Vector precision_surface(const Matrix& W, const Vector& beta_phi) {
    if (W.cols() != beta_phi.size()) {
        throw DimensionError("precision_surface: W/beta_phi shapes do not conform");
    }
    return (W * beta_phi).array().exp();
}

double log_penalized_posterior(const CompositionDataset& ds, const CoefficientSet& c,
                               const LatentState& l, const ModelConfig& config) {
    check_shapes(ds, c, l, config);
    const Index n = ds.n_obs();
    const Index P = ds.n_dim();

    const Matrix mu = mean_surface(ds.X, c.beta, config.random_effects ? c.u : std::nullopt,
                                   config.random_effects ? ds.group : std::nullopt);
    const Vector log_phi = ds.W * c.beta_phi;

    double lp = 0.0;

    // Dirichlet log-likelihood of each response row at alpha = exp(log_alpha).
    for (Index i = 0; i < n; ++i) {
        double a0 = 0.0;
        for (Index j = 0; j < P; ++j) {
            const double a = std::exp(l.log_alpha(i, j));
            a0 += a;
            lp += -log_gamma(a) + (a - 1.0) * std::log(ds.Y(i, j));
        }
        lp += log_gamma(a0);
    }

    // Gaussian coupling of log-alpha to the modeled log-mean + log-precision.
    const double half_log_xi_star = 0.5 * (std::log(l.xi_star) - kLog2Pi);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < P; ++j) {
            const double r = l.log_alpha(i, j) - std::log(mu(i, j)) - log_phi(i);
            lp += half_log_xi_star - 0.5 * l.xi_star * r * r;
        }
    }

    // Soft sum-to-one penalty on the mean rows.
    const double half_log_xi = 0.5 * (std::log(l.xi) - kLog2Pi);
    for (Index i = 0; i < n; ++i) {
        const double d = mu.row(i).sum() - 1.0;
        lp += half_log_xi - 0.5 * l.xi * d * d;
    }

    // Vague normal priors on all regression coefficients.
    const double v = config.prior_beta_variance;
    const double half_log_prior = -0.5 * (kLog2Pi + std::log(v));
    lp += static_cast<double>(c.beta.size() + c.beta_phi.size()) * half_log_prior;
    lp += -0.5 * (c.beta.squaredNorm() + c.beta_phi.squaredNorm()) / v;

    // Exponential priors on the penalty precisions.
    const double r_xi = config.xi_rate(P);
    const double r_xs = config.xi_star_rate(P);
    lp += std::log(r_xi) - r_xi * l.xi;
    lp += std::log(r_xs) - r_xs * l.xi_star;

    // Random-effect layer: normal intercepts with exponential scale priors.
    if (config.random_effects) {
        const Matrix& u = *c.u;
        const Vector& su = *c.sigma_u;
        const double r_u = 1.0 / config.sigma_u_prior_mean;
        for (Index j = 0; j < P; ++j) {
            const double var = su(j) * su(j);
            for (Index g = 0; g < u.rows(); ++g) {
                lp += -0.5 * (kLog2Pi + std::log(var)) - 0.5 * u(g, j) * u(g, j) / var;
            }
            lp += std::log(r_u) - r_u * su(j);
        }
    }
    return lp;
}

Vector log_penalized_posterior_grad_regression(const CompositionDataset& ds,
                                               const CoefficientSet& c, const LatentState& l,
                                               const ModelConfig& config) {
    check_shapes(ds, c, l, config);
    const Index n = ds.n_obs();
    const Index P = ds.n_dim();
    const Index Q = ds.X.cols();
    const Index R = ds.W.cols();

    const Matrix mu = mean_surface(ds.X, c.beta, config.random_effects ? c.u : std::nullopt,
                                   config.random_effects ? ds.group : std::nullopt);
    const Vector log_phi = ds.W * c.beta_phi;

    // d lp / d eta_ij combines the coupling term (through ln mu) and the
    // row-sum penalty (through mu).
    Matrix deta(n, P);
    Vector dlogphi = Vector::Zero(n);
    for (Index i = 0; i < n; ++i) {
        const double d = mu.row(i).sum() - 1.0;
        for (Index j = 0; j < P; ++j) {
            const double r = l.log_alpha(i, j) - std::log(mu(i, j)) - log_phi(i);
            const double m = mu(i, j);
            deta(i, j) = l.xi_star * r * (1.0 - m) - l.xi * d * m * (1.0 - m);
            dlogphi(i) += l.xi_star * r;
        }
    }

    const bool re = config.random_effects;
    const Index G = re ? ds.n_groups() : 0;
    Vector grad(Q * P + R + (re ? G * P : 0));
    grad.setZero();

    // beta, column-major over (k, j).
    for (Index j = 0; j < P; ++j) {
        for (Index k = 0; k < Q; ++k) {
            double g = -c.beta(k, j) / config.prior_beta_variance;
            for (Index i = 0; i < n; ++i) g += ds.X(i, k) * deta(i, j);
            grad(j * Q + k) = g;
        }
    }
    // beta_phi.
    for (Index r = 0; r < R; ++r) {
        double g = -c.beta_phi(r) / config.prior_beta_variance;
        for (Index i = 0; i < n; ++i) g += ds.W(i, r) * dlogphi(i);
        grad(Q * P + r) = g;
    }
    // u, column-major over (g, j).
    if (re) {
        const Matrix& u = *c.u;
        const Vector& su = *c.sigma_u;
        const auto& group = *ds.group;
        for (Index i = 0; i < n; ++i) {
            const Index g = group[static_cast<std::size_t>(i)];
            for (Index j = 0; j < P; ++j) {
                grad(Q * P + R + j * G + g) += deta(i, j);
            }
        }
        for (Index j = 0; j < P; ++j) {
            for (Index g = 0; g < G; ++g) {
                grad(Q * P + R + j * G + g) -= u(g, j) / (su(j) * su(j));
            }
        }
    }
    return grad;
}

CorrectedDraw apply_corrections(const Matrix& mu_draw, const Vector& phi_draw) {
    if (mu_draw.rows() != phi_draw.size()) {
        throw DimensionError("apply_corrections: mu/phi row counts differ");
    }
    CorrectedDraw out;
    out.mu_adj.resize(mu_draw.rows(), mu_draw.cols());
    out.alpha_adj.resize(mu_draw.rows(), mu_draw.cols());
    for (Index i = 0; i < mu_draw.rows(); ++i) {
        const double s = mu_draw.row(i).sum();
        if (!(s > 0.0)) throw DomainError("apply_corrections: non-positive row sum");
        out.mu_adj.row(i) = mu_draw.row(i) / s;
        out.alpha_adj.row(i) = out.mu_adj.row(i) * phi_draw(i);
    }
    return out;
}

}  // namespace dirireg
