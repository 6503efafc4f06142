#include "dirireg/metrics.hpp"

#include <cmath>

#include "dirireg/errors.hpp"

namespace dirireg {

Vector clr(const Vector& x) {
    Vector lx(x.size());
    for (Index j = 0; j < x.size(); ++j) {
        if (!(x(j) > 0.0)) {
            throw DomainError("clr: component " + std::to_string(j + 1) +
                              " not strictly positive; apply zero_replace upstream");
        }
        lx(j) = std::log(x(j));
    }
    return lx.array() - lx.mean();
}

double aitchison_distance(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionError("aitchison_distance: dimension mismatch");
    return (clr(a) - clr(b)).norm();
}

double sce(const Matrix& estimated, const Matrix& target) {
    if (estimated.rows() != target.rows() || estimated.cols() != target.cols()) {
        throw DimensionError("sce: shape mismatch");
    }
    double total = 0.0;
    for (Index i = 0; i < estimated.rows(); ++i) {
        total += aitchison_distance(estimated.row(i).transpose(), target.row(i).transpose());
    }
    return total;
}

CoverageWidth coverage_and_width(const Matrix& lower, const Matrix& upper, const Matrix& truth,
                                 const Matrix& expected) {
    if (lower.rows() != upper.rows() || lower.cols() != upper.cols() ||
        lower.rows() != truth.rows() || lower.cols() != truth.cols() ||
        lower.rows() != expected.rows() || lower.cols() != expected.cols()) {
        throw DimensionError("coverage_and_width: shape mismatch");
    }
    double covered = 0.0;
    double width = 0.0;
    const double cells = static_cast<double>(lower.size());
    for (Index i = 0; i < lower.rows(); ++i) {
        for (Index j = 0; j < lower.cols(); ++j) {
            if (lower(i, j) > upper(i, j)) {
                throw DomainError("coverage_and_width: lower > upper");
            }
            if (!(expected(i, j) > 0.0)) {
                throw DomainError("coverage_and_width: zero expected value");
            }
            if (lower(i, j) <= truth(i, j) && truth(i, j) <= upper(i, j)) covered += 1.0;
            width += (upper(i, j) - lower(i, j)) / expected(i, j);
        }
    }
    return {covered / cells, width / cells};
}

}  // namespace dirireg
