#pragma once

#include <Eigen/Dense>

namespace dirireg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace dirireg
