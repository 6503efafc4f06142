#include "dirireg/dirichlet.hpp"

#include <algorithm>
#include <cmath>

#include "dirireg/errors.hpp"
#include "dirireg/special_functions.hpp"

namespace dirireg {

Composition::Composition(Vector y) : y_(std::move(y)) {
    if (y_.size() < 2) throw DimensionError("Composition: need at least 2 components");
    for (Index j = 0; j < y_.size(); ++j) {
        if (!(y_(j) >= kCompositionFloor) || !(y_(j) < 1.0)) {
            throw DomainError("Composition: component " + std::to_string(j + 1) +
                              " outside [1e-12, 1); apply zero_replace upstream");
        }
    }
    const double s = y_.sum();
    if (std::abs(s - 1.0) > 1e-9) {
        throw DomainError("Composition: components sum to " + std::to_string(s) +
                          ", expected 1 within 1e-9");
    }
}

Vector zero_replace(const Vector& raw, double eps, double floor) {
    Index n_small = 0;
    for (Index j = 0; j < raw.size(); ++j) {
        if (raw(j) < 0.0) throw DomainError("zero_replace: negative component");
        if (raw(j) < floor) ++n_small;
    }
    Vector out = raw;
    if (n_small > 0) {
        const double shrink = 1.0 - eps * static_cast<double>(n_small);
        for (Index j = 0; j < out.size(); ++j) {
            out(j) = (out(j) < floor) ? eps : out(j) * shrink;
        }
    }
    return out / out.sum();
}

DirichletParams::DirichletParams(Vector alpha) : alpha_(std::move(alpha)) {
    if (alpha_.size() < 2) throw DimensionError("DirichletParams: need at least 2 components");
    for (Index j = 0; j < alpha_.size(); ++j) {
        if (!(alpha_(j) > 0.0)) {
            throw DomainError("DirichletParams: alpha[" + std::to_string(j + 1) +
                              "] must be positive");
        }
    }
    alpha0_ = alpha_.sum();
}

double log_density_raw(const Vector& y, const Vector& alpha) {
    double lp = log_gamma(alpha.sum());
    for (Index j = 0; j < alpha.size(); ++j) {
        if (!(y(j) > 0.0)) throw DomainError("log_density: non-positive component");
        lp += -log_gamma(alpha(j)) + (alpha(j) - 1.0) * std::log(y(j));
    }
    return lp;
}

double log_density(const Composition& y, const DirichletParams& params) {
    if (y.dim() != params.dim()) throw DimensionError("log_density: dimension mismatch");
    return log_density_raw(y.values(), params.alpha());
}

MomentSummary moments(const DirichletParams& params) {
    const Vector& a = params.alpha();
    const double a0 = params.alpha0();
    const Index p = a.size();
    MomentSummary m;
    m.mean = a / a0;
    m.covariance.resize(p, p);
    const double denom = a0 * a0 * (1.0 + a0);
    for (Index i = 0; i < p; ++i) {
        for (Index j = 0; j < p; ++j) {
            m.covariance(i, j) = (i == j) ? a(i) * (a0 - a(i)) / denom
                                          : -a(i) * a(j) / denom;
        }
    }
    return m;
}

Vector sample_one(const Vector& alpha, Rng& rng) {
    Vector g(alpha.size());
    for (Index j = 0; j < alpha.size(); ++j) g(j) = rng.gamma(alpha(j));
    return g / g.sum();
}

std::vector<Composition> sample(const DirichletParams& params, std::size_t n, Rng& rng) {
    std::vector<Composition> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.emplace_back(zero_replace(sample_one(params.alpha(), rng)));
    }
    return out;
}

std::vector<Composition> sample(const DirichletParams& params, std::size_t n,
                                std::uint64_t rng_seed) {
    if (n < 1) throw DomainError("sample: n must be >= 1");
    Rng rng(rng_seed);
    return sample(params, n, rng);
}

DirichletParams marginal(const DirichletParams& params, const std::vector<Index>& subset) {
    const Index p = params.dim();
    if (subset.empty() || static_cast<Index>(subset.size()) >= p) {
        throw DomainError("marginal: subset must be a non-empty proper subset");
    }
    std::vector<bool> seen(static_cast<std::size_t>(p), false);
    Vector out(static_cast<Index>(subset.size()) + 1);
    double taken = 0.0;
    for (std::size_t k = 0; k < subset.size(); ++k) {
        const Index j = subset[k];
        if (j < 0 || j >= p || seen[static_cast<std::size_t>(j)]) {
            throw DomainError("marginal: invalid or repeated index in subset");
        }
        seen[static_cast<std::size_t>(j)] = true;
        out(static_cast<Index>(k)) = params.alpha()(j);
        taken += params.alpha()(j);
    }
    out(out.size() - 1) = params.alpha0() - taken;
    return DirichletParams(out);
}

namespace {

Vector sample_mean(const std::vector<Composition>& sample) {
    Vector mean = Vector::Zero(sample.front().dim());
    for (const auto& c : sample) mean += c.values();
    return mean / static_cast<double>(sample.size());
}

Vector mean_log(const std::vector<Composition>& sample) {
    Vector ml = Vector::Zero(sample.front().dim());
    for (const auto& c : sample) ml += c.values().array().log().matrix();
    return ml / static_cast<double>(sample.size());
}

}  // namespace

DirichletParams fit_moments(const std::vector<Composition>& sample) {
    if (sample.size() < 2) throw DegenerateDataError("fit_moments: need at least 2 observations");
    const Vector mean = sample_mean(sample);
    const double m1 = mean(0);
    double var1 = 0.0;
    for (const auto& c : sample) {
        const double d = c[0] - m1;
        var1 += d * d;
    }
    var1 /= static_cast<double>(sample.size() - 1);
    if (var1 <= 0.0) throw DegenerateDataError("fit_moments: zero variance in first coordinate");
    const double alpha0 = m1 * (1.0 - m1) / var1 - 1.0;
    if (!(alpha0 > 0.0)) {
        throw DegenerateDataError("fit_moments: implied concentration not positive");
    }
    return DirichletParams(mean * alpha0);
}

double mean_log_likelihood(const std::vector<Composition>& sample,
                           const DirichletParams& params) {
    double ll = 0.0;
    for (const auto& c : sample) ll += log_density(c, params);
    return ll / static_cast<double>(sample.size());
}

DirichletParams fit_ml(const std::vector<Composition>& sample, double tol,
                       std::size_t max_iter) {
    if (sample.size() < 2) throw DegenerateDataError("fit_ml: need at least 2 observations");
    const Vector mlog = mean_log(sample);
    Vector alpha = fit_moments(sample).alpha();
    for (std::size_t it = 0; it < max_iter; ++it) {
        const double psi_a0 = digamma(alpha.sum());
        Vector next(alpha.size());
        double max_delta = 0.0;
        for (Index j = 0; j < alpha.size(); ++j) {
            next(j) = inverse_digamma(psi_a0 + mlog(j));
            max_delta = std::max(max_delta, std::abs(next(j) - alpha(j)));
        }
        alpha = next;
        if (max_delta < tol) return DirichletParams(alpha);
    }
    throw ConvergenceError("fit_ml: fixed point did not converge",
                           std::vector<double>(alpha.data(), alpha.data() + alpha.size()));
}

}  // namespace dirireg
