#pragma once

#include <functional>

#include "dirireg/linalg.hpp"

namespace dirireg {

struct BfgsOptions {
    std::size_t max_iterations = 500;
    double grad_tol = 1e-7;  // max-norm of the gradient at the solution
    double c1 = 1e-4;        // Armijo sufficient-decrease constant
};

struct BfgsResult {
    Vector x;
    double value = 0.0;
    Vector gradient;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Minimizes f with a BFGS inverse-Hessian approximation and backtracking
/// Armijo line search. `f` returns the value and writes the gradient.
BfgsResult minimize_bfgs(const std::function<double(const Vector&, Vector&)>& f, Vector x0,
                         const BfgsOptions& options = {});

}  // namespace dirireg
