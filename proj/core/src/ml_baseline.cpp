#include "dirireg/ml_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dirireg/bfgs.hpp"
#include "dirireg/dirichlet.hpp"
#include "dirireg/diagnostics.hpp"
#include "dirireg/errors.hpp"
#include "dirireg/links.hpp"
#include "dirireg/rng.hpp"
#include "dirireg/special_functions.hpp"

namespace dirireg {

namespace {

struct Shapes {
    Index n, P, Q, R;
    Index n_free;  // Q*(P-1) + R
};

Shapes shapes_of(const CompositionDataset& ds) {
    Shapes s{ds.n_obs(), ds.n_dim(), ds.X.cols(), ds.W.cols(), 0};
    s.n_free = s.Q * (s.P - 1) + s.R;
    return s;
}

// Unpacks theta into a full Q x P beta (base column zero) and beta_phi.
void unpack(const Vector& theta, const Shapes& s, Index base, Matrix& beta, Vector& beta_phi) {
    beta = Matrix::Zero(s.Q, s.P);
    Index k = 0;
    for (Index j = 0; j < s.P; ++j) {
        if (j == base) continue;
        for (Index q = 0; q < s.Q; ++q) beta(q, j) = theta(k++);
    }
    beta_phi = theta.segment(k, s.R);
}

}  // namespace

double ml_log_likelihood(const CompositionDataset& ds, const Vector& theta, Index base_dim,
                         Vector* grad) {
    const Shapes s = shapes_of(ds);
    if (theta.size() != s.n_free) throw DimensionError("ml_log_likelihood: bad theta length");
    Matrix beta;
    Vector beta_phi;
    unpack(theta, s, base_dim, beta, beta_phi);

    const Matrix mu = softmax_rows(ds.X * beta);
    const Vector log_phi = ds.W * beta_phi;

    double ll = 0.0;
    Matrix deta;
    Vector dlogphi;
    if (grad) {
        deta.setZero(s.n, s.P);
        dlogphi.setZero(s.n);
    }
    for (Index i = 0; i < s.n; ++i) {
        const double phi = std::exp(log_phi(i));
        ll += log_gamma(phi);
        double s_i = 0.0;  // sum_l g_il mu_il
        for (Index j = 0; j < s.P; ++j) {
            const double a = mu(i, j) * phi;
            const double lny = std::log(ds.Y(i, j));
            ll += -log_gamma(a) + (a - 1.0) * lny;
            if (grad) {
                const double g = digamma(phi) - digamma(a) + lny;
                deta(i, j) = g;  // reused below
                s_i += g * mu(i, j);
            }
        }
        if (grad) {
            for (Index j = 0; j < s.P; ++j) {
                deta(i, j) = phi * mu(i, j) * (deta(i, j) - s_i);
            }
            dlogphi(i) = phi * s_i;
        }
    }
    if (grad) {
        grad->resize(s.n_free);
        Index k = 0;
        for (Index j = 0; j < s.P; ++j) {
            if (j == base_dim) continue;
            for (Index q = 0; q < s.Q; ++q) {
                double g = 0.0;
                for (Index i = 0; i < s.n; ++i) g += ds.X(i, q) * deta(i, j);
                (*grad)(k++) = g;
            }
        }
        for (Index r = 0; r < s.R; ++r) {
            double g = 0.0;
            for (Index i = 0; i < s.n; ++i) g += ds.W(i, r) * dlogphi(i);
            (*grad)(k++) = g;
        }
    }
    return ll;
}

namespace {

Vector moments_start(const CompositionDataset& ds, const Shapes& s, Index base) {
    // Log-ratio targets relative to the base dimension, least squares on X.
    Matrix Z(s.n, s.P);
    for (Index i = 0; i < s.n; ++i) {
        for (Index j = 0; j < s.P; ++j) {
            const double num = std::clamp(ds.Y(i, j), 1e-6, 1.0);
            const double den = std::clamp(ds.Y(i, base), 1e-6, 1.0);
            Z(i, j) = std::log(num / den);
        }
    }
    const Matrix beta0 = ds.X.colPivHouseholderQr().solve(Z);

    double alpha0_hat = static_cast<double>(s.P);
    try {
        std::vector<Composition> rows;
        for (Index i = 0; i < s.n; ++i) rows.emplace_back(ds.Y.row(i).transpose());
        alpha0_hat = fit_moments(rows).alpha0();
    } catch (const Error&) {
    }
    const Vector target = Vector::Constant(s.n, std::log(alpha0_hat));
    const Vector bphi0 = ds.W.colPivHouseholderQr().solve(target);

    Vector theta(s.n_free);
    Index k = 0;
    for (Index j = 0; j < s.P; ++j) {
        if (j == base) continue;
        for (Index q = 0; q < s.Q; ++q) theta(k++) = beta0(q, j);
    }
    theta.segment(k, s.R) = bphi0;
    return theta;
}

Matrix numeric_hessian(const CompositionDataset& ds, const Vector& theta, Index base) {
    const Index m = theta.size();
    Matrix H(m, m);
    Vector gp(m), gm(m), t = theta;
    for (Index k = 0; k < m; ++k) {
        const double h = 1e-4 * (1.0 + std::abs(theta(k)));
        t(k) = theta(k) + h;
        ml_log_likelihood(ds, t, base, &gp);
        t(k) = theta(k) - h;
        ml_log_likelihood(ds, t, base, &gm);
        t(k) = theta(k);
        H.col(k) = (gp - gm) / (2.0 * h);
    }
    return 0.5 * (H + H.transpose());
}

}  // namespace

MLFit fit_ml_regression(const CompositionDataset& ds, const MLOptions& opt) {
    const Shapes s = shapes_of(ds);
    if (opt.base_dim < 0 || opt.base_dim >= s.P) throw DomainError("fit_ml_regression: bad base dimension");

    const auto objective = [&](const Vector& x, Vector& g) {
        const double ll = ml_log_likelihood(ds, x, opt.base_dim, &g);
        g = -g;
        return -ll;
    };

    BfgsOptions bopt;
    bopt.grad_tol = opt.grad_tol;
    bopt.max_iterations = opt.max_iterations;

    const Vector start = moments_start(ds, s, opt.base_dim);
    Rng rng(opt.restart_seed);
    BfgsResult best;
    bool have_best = false;
    for (int attempt = 0; attempt <= opt.extra_restarts; ++attempt) {
        Vector x0 = start;
        if (attempt > 0) {
            for (Index k = 0; k < x0.size(); ++k) x0(k) += 0.5 * rng.normal();
        }
        BfgsResult r = minimize_bfgs(objective, x0, bopt);
        if (!have_best || r.value < best.value) {
            best = std::move(r);
            have_best = true;
        }
    }
    if (!best.converged) {
        throw ConvergenceError(
            "fit_ml_regression: optimizer did not reach gradient tolerance (|g|max = " +
                std::to_string(best.gradient.lpNorm<Eigen::Infinity>()) + ")",
            std::vector<double>(best.x.data(), best.x.data() + best.x.size()));
    }

    MLFit fit;
    fit.base_dim = opt.base_dim;
    fit.estimates = best.x;
    fit.log_likelihood = -best.value;
    fit.iterations = best.iterations;
    unpack(best.x, s, opt.base_dim, fit.beta, fit.beta_phi);
    fit.mu_hat = softmax_rows(ds.X * fit.beta);
    fit.phi_hat = (ds.W * fit.beta_phi).array().exp();

    for (Index j = 0; j < s.P; ++j) {
        if (j == opt.base_dim) continue;
        for (Index q = 0; q < s.Q; ++q) {
            fit.param_names.push_back("beta[" + std::to_string(q + 1) + "," + std::to_string(j + 1) + "]");
        }
    }
    for (Index r = 0; r < s.R; ++r) fit.param_names.push_back("beta_phi[" + std::to_string(r + 1) + "]");

    // Observed information from a numeric Hessian of the log-likelihood.
    const Matrix H = numeric_hessian(ds, best.x, opt.base_dim);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(-H);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    fit.se = Vector::Constant(s.n_free, nan);
    fit.wald_p = Vector::Constant(s.n_free, nan);
    if (eig.eigenvalues().minCoeff() > 1e-10) {
        fit.covariance = (-H).ldlt().solve(Matrix::Identity(s.n_free, s.n_free));
        fit.covariance = 0.5 * (fit.covariance + fit.covariance.transpose());
        fit.inference_available = true;
        for (Index k = 0; k < s.n_free; ++k) {
            const double var = fit.covariance(k, k);
            if (var > 0.0) {
                fit.se(k) = std::sqrt(var);
                fit.wald_p(k) = normal_two_sided_p(fit.estimates(k) / fit.se(k));
            }
        }
    } else {
        fit.warnings.push_back(
            "observed information matrix is not positive definite; Wald inference unavailable");
    }
    return fit;
}

Vector wald_test(const MLFit& fit) {
    if (!fit.inference_available) {
        throw DiagnosticsError("wald_test: covariance unavailable (singular Hessian)");
    }
    Vector p(fit.estimates.size());
    for (Index k = 0; k < fit.estimates.size(); ++k) {
        const double var = fit.covariance(k, k);
        p(k) = var > 0.0 ? normal_two_sided_p(fit.estimates(k) / std::sqrt(var))
                         : std::numeric_limits<double>::quiet_NaN();
    }
    return p;
}

MuIntervals ml_mu_intervals(const MLFit& fit, const CompositionDataset& ds, double level) {
    const Shapes s = shapes_of(ds);
    MuIntervals out;
    out.lower.resize(s.n, s.P);
    out.upper.resize(s.n, s.P);
    const double tail = 0.5 * (1.0 - level);
    double zq = 1.959963984540054;
    if (std::abs(level - 0.95) > 1e-12) {  // Newton solve for other levels
        zq = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double f = normal_cdf(zq) - (1.0 - tail);
            const double pdf = std::exp(-0.5 * zq * zq) / std::sqrt(2.0 * M_PI);
            zq -= f / pdf;
        }
    }

    if (!fit.inference_available) {
        out.lower.setConstant(std::numeric_limits<double>::quiet_NaN());
        out.upper.setConstant(std::numeric_limits<double>::quiet_NaN());
        return out;
    }

    // Delta method: dmu_il/dbeta_kj = x_ik mu_il (delta_lj - mu_ij).
    for (Index i = 0; i < s.n; ++i) {
        for (Index l = 0; l < s.P; ++l) {
            Vector jac = Vector::Zero(s.n_free);
            Index k = 0;
            for (Index j = 0; j < s.P; ++j) {
                if (j == fit.base_dim) continue;
                const double factor = fit.mu_hat(i, l) * ((l == j ? 1.0 : 0.0) - fit.mu_hat(i, j));
                for (Index q = 0; q < s.Q; ++q) jac(k++) = ds.X(i, q) * factor;
            }
            const double var = jac.dot(fit.covariance * jac);
            const double sd = var > 0.0 ? std::sqrt(var) : 0.0;
            out.lower(i, l) = fit.mu_hat(i, l) - zq * sd;
            out.upper(i, l) = fit.mu_hat(i, l) + zq * sd;
        }
    }
    return out;
}

MuIntervals ml_plug_in_predictive(const MLFit& fit, std::size_t n_draws, std::uint64_t seed,
                                  double level) {
    const Index n = fit.mu_hat.rows();
    const Index P = fit.mu_hat.cols();
    MuIntervals out;
    out.lower.resize(n, P);
    out.upper.resize(n, P);
    Rng rng(mix_seed(seed, 0x71));
    const double tail = 0.5 * (1.0 - level);
    std::vector<std::vector<double>> cells(static_cast<std::size_t>(P));
    for (Index i = 0; i < n; ++i) {
        for (auto& c : cells) c.assign(n_draws, 0.0);
        Vector alpha = fit.mu_hat.row(i).transpose() * fit.phi_hat(i);
        for (std::size_t t = 0; t < n_draws; ++t) {
            const Vector y = sample_one(alpha, rng);
            for (Index j = 0; j < P; ++j) cells[static_cast<std::size_t>(j)][t] = y(j);
        }
        for (Index j = 0; j < P; ++j) {
            out.lower(i, j) = quantile(cells[static_cast<std::size_t>(j)], tail);
            out.upper(i, j) = quantile(cells[static_cast<std::size_t>(j)], 1.0 - tail);
        }
    }
    return out;
}

}  // namespace dirireg
