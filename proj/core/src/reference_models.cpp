#include "dirireg/reference_models.hpp"

#include <algorithm>
#include <cmath>

#include "dirireg/errors.hpp"
#include "dirireg/links.hpp"

namespace dirireg {

namespace {

Matrix logit_responses(const CompositionDataset& ds) {
    Matrix Z(ds.n_obs(), ds.n_dim());
    for (Index i = 0; i < Z.rows(); ++i) {
        for (Index j = 0; j < Z.cols(); ++j) {
            Z(i, j) = logit(std::clamp(ds.Y(i, j), 0.001, 0.999));
        }
    }
    return Z;
}

constexpr double kZ95 = 1.959963984540054;

double normal_quantile(double level) {
    if (std::abs(level - 0.95) < 1e-12) return kZ95;
    // crude bisection; reference analyses only
    double lo = 0.0, hi = 10.0;
    const double target = 0.5 + level / 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (0.5 * std::erfc(-mid * M_SQRT1_2) < target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

LogitLinearFit fit_logit_lm(const CompositionDataset& ds, double level) {
    const Index n = ds.n_obs();
    const Index P = ds.n_dim();
    const Index Q = ds.X.cols();
    if (n <= Q) throw DegenerateDataError("fit_logit_lm: need more rows than columns");
    const Matrix Z = logit_responses(ds);
    const double zq = normal_quantile(level);

    LogitLinearFit fit;
    fit.beta.resize(Q, P);
    fit.fitted.resize(n, P);
    fit.lower.resize(n, P);
    fit.upper.resize(n, P);
    fit.sigma.resize(P);

    const Matrix xtx_inv =
        (ds.X.transpose() * ds.X).ldlt().solve(Matrix::Identity(Q, Q));
    for (Index j = 0; j < P; ++j) {
        const Vector b = xtx_inv * (ds.X.transpose() * Z.col(j));
        fit.beta.col(j) = b;
        const Vector resid = Z.col(j) - ds.X * b;
        const double s2 = resid.squaredNorm() / static_cast<double>(n - Q);
        fit.sigma(j) = std::sqrt(s2);
        for (Index i = 0; i < n; ++i) {
            const double eta = ds.X.row(i) * b;
            const double se = std::sqrt(s2 * (ds.X.row(i) * xtx_inv * ds.X.row(i).transpose())(0, 0));
            fit.fitted(i, j) = inv_logit(eta);
            fit.lower(i, j) = inv_logit(eta - zq * se);
            fit.upper(i, j) = inv_logit(eta + zq * se);
        }
    }
    return fit;
}

LogitMixedFit fit_logit_lmm(const CompositionDataset& ds, double level) {
    if (!ds.group) throw InitializationError("fit_logit_lmm: dataset has no group labels");
    const Index n = ds.n_obs();
    const Index P = ds.n_dim();
    const Index Q = ds.X.cols();
    const Index G = ds.n_groups();
    const auto& group = *ds.group;
    const Matrix Z = logit_responses(ds);
    const double zq = normal_quantile(level);

    std::vector<std::vector<Index>> rows(static_cast<std::size_t>(G));
    for (Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(group[static_cast<std::size_t>(i)])].push_back(i);

    LogitMixedFit fit;
    fit.beta.resize(Q, P);
    fit.sigma_u.resize(P);
    fit.sigma.resize(P);
    fit.fitted.resize(n, P);
    fit.lower.resize(n, P);
    fit.upper.resize(n, P);

    // Profile log-likelihood in the variance ratio lambda = s_u^2 / s_e^2.
    // V inverts per group via Woodbury: V_g^{-1} = I - lambda/(1+n_g lambda) 11'.
    auto profile = [&](double lambda, Index j, Vector* beta_out, double* s2_out, Matrix* xvx_out) {
        Matrix xvx = Matrix::Zero(Q, Q);
        Vector xvz = Vector::Zero(Q);
        double logdet = 0.0;
        for (const auto& idx : rows) {
            const double ng = static_cast<double>(idx.size());
            const double shrink = lambda / (1.0 + ng * lambda);
            logdet += std::log(1.0 + ng * lambda);
            Vector xsum = Vector::Zero(Q);
            double zsum = 0.0;
            for (Index i : idx) {
                xvx += ds.X.row(i).transpose() * ds.X.row(i);
                xvz += ds.X.row(i).transpose() * Z(i, j);
                xsum += ds.X.row(i).transpose();
                zsum += Z(i, j);
            }
            xvx -= shrink * xsum * xsum.transpose();
            xvz -= shrink * xsum * zsum;
        }
        const Vector beta = xvx.ldlt().solve(xvz);
        // quadratic form of the residuals under V^{-1}
        double quad = 0.0;
        for (const auto& idx : rows) {
            const double ng = static_cast<double>(idx.size());
            const double shrink = lambda / (1.0 + ng * lambda);
            double rsum = 0.0;
            for (Index i : idx) {
                const double r = Z(i, j) - ds.X.row(i) * beta;
                quad += r * r;
                rsum += r;
            }
            quad -= shrink * rsum * rsum;
        }
        const double s2 = quad / static_cast<double>(n);
        if (beta_out) *beta_out = beta;
        if (s2_out) *s2_out = s2;
        if (xvx_out) *xvx_out = xvx;
        return -0.5 * static_cast<double>(n) * std::log(s2) - 0.5 * logdet;
    };

    for (Index j = 0; j < P; ++j) {
        // golden-section search on log lambda
        double lo = -12.0, hi = 8.0;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
        double fa = profile(std::exp(a), j, nullptr, nullptr, nullptr);
        double fb = profile(std::exp(b), j, nullptr, nullptr, nullptr);
        for (int it = 0; it < 80; ++it) {
            if (fa < fb) {
                lo = a;
                a = b;
                fa = fb;
                b = lo + gr * (hi - lo);
                fb = profile(std::exp(b), j, nullptr, nullptr, nullptr);
            } else {
                hi = b;
                b = a;
                fb = fa;
                a = hi - gr * (hi - lo);
                fa = profile(std::exp(a), j, nullptr, nullptr, nullptr);
            }
        }
        const double lambda = std::exp(0.5 * (lo + hi));
        Vector beta;
        double s2;
        Matrix xvx;
        profile(lambda, j, &beta, &s2, &xvx);
        fit.beta.col(j) = beta;
        fit.sigma(j) = std::sqrt(s2);
        fit.sigma_u(j) = std::sqrt(lambda * s2);
        const Matrix cov = xvx.ldlt().solve(Matrix::Identity(Q, Q)) * s2;
        for (Index i = 0; i < n; ++i) {
            const double eta = ds.X.row(i) * beta;
            const double se = std::sqrt((ds.X.row(i) * cov * ds.X.row(i).transpose())(0, 0));
            fit.fitted(i, j) = inv_logit(eta);
            fit.lower(i, j) = inv_logit(eta - zq * se);
            fit.upper(i, j) = inv_logit(eta + zq * se);
        }
    }
    return fit;
}

}  // namespace dirireg
