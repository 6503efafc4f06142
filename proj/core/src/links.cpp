#include "dirireg/links.hpp"

#include <cmath>

#include "dirireg/errors.hpp"

namespace dirireg {

double logit(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("logit: p must lie in (0,1)");
    return std::log(p / (1.0 - p));
}

double inv_logit(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double log_inv_logit(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

double log_link(double phi) {
    if (!(phi > 0.0)) throw DomainError("log_link: phi must be positive");
    return std::log(phi);
}

double inv_log(double x) { return std::exp(x); }

Matrix softmax_rows(const Matrix& eta) {
    Matrix out(eta.rows(), eta.cols());
    for (Index i = 0; i < eta.rows(); ++i) {
        const double m = eta.row(i).maxCoeff();
        double sum = 0.0;
        for (Index j = 0; j < eta.cols(); ++j) {
            const double e = std::exp(eta(i, j) - m);
            out(i, j) = e;
            sum += e;
        }
        out.row(i) /= sum;
    }
    return out;
}

Matrix inverse_multivariate_logit(const Matrix& eta) { return softmax_rows(eta); }

}  // namespace dirireg
