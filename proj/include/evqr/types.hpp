#pragma once

#include <Eigen/Dense>

namespace evqr {

// Row-major throughout: cost/coupling/exponent sweeps stream along rows.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace evqr
