#include "dirireg/bfgs.hpp"

#include <cmath>

namespace dirireg {

BfgsResult minimize_bfgs(const std::function<double(const Vector&, Vector&)>& f, Vector x0,
                         const BfgsOptions& opt) {
    const Index n = x0.size();
    BfgsResult res;
    res.x = std::move(x0);
    res.gradient.resize(n);
    res.value = f(res.x, res.gradient);

    Matrix H = Matrix::Identity(n, n);
    for (std::size_t it = 0; it < opt.max_iterations; ++it) {
        res.iterations = it;
        if (res.gradient.lpNorm<Eigen::Infinity>() <= opt.grad_tol) {
            res.converged = true;
            return res;
        }

        Vector p = -(H * res.gradient);
        double gtp = res.gradient.dot(p);
        if (gtp >= 0.0) {  // reset when the approximation loses descent
            H.setIdentity();
            p = -res.gradient;
            gtp = res.gradient.dot(p);
        }

        double step = 1.0;
        Vector x_new;
        Vector g_new(n);
        double f_new = res.value;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = res.x + step * p;
            f_new = f(x_new, g_new);
            if (std::isfinite(f_new) && f_new <= res.value + opt.c1 * step * gtp) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            res.converged = res.gradient.lpNorm<Eigen::Infinity>() <= 10.0 * opt.grad_tol;
            return res;
        }

        const Vector s = x_new - res.x;
        const Vector y = g_new - res.gradient;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Matrix I = Matrix::Identity(n, n);
            H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
                rho * s * s.transpose();
        }
        res.x = std::move(x_new);
        res.gradient = g_new;
        res.value = f_new;
    }
    res.converged = res.gradient.lpNorm<Eigen::Infinity>() <= opt.grad_tol;
    return res;
}

}  // namespace dirireg
