#pragma once

#include <stdexcept>
#include <string>

#include "evqr/problem.hpp"

namespace evqr {

struct NewtonConfig {
  double grad_tol = 1e-10;  // stop when ||tilted mean of x|| <= grad_tol
  int max_iters = 50;
  double ridge = 1e-12;    // added as ridge*tr(H)*I when H is near-singular
  double backtrack = 0.5;  // step-shrink factor
};

struct newton_error : std::runtime_error {
  newton_error(Index row_, double residual_, const std::string& what_)
      : std::runtime_error(what_), row(row_), residual(residual_) {}
  Index row;
  double residual;
};

// Solves the per-row mean-independence equation
//   sum_j b_j x_j exp((<g, x_j> + h_j - C_ij)/eps) = 0
// by damped Newton on the strictly convex map
//   g -> eps log sum_j b_j exp((<g, x_j> + h_j - C_ij)/eps),
// whose gradient is the tilted mean of x and whose Hessian is the tilted
// covariance of x divided by eps. Backtracks on residual-norm decrease, with
// objective decrease as the fallback acceptance: at small eps the weights
// saturate to a point mass and the residual is locally constant, while the
// objective still falls linearly toward the solution. Trial steps are capped
// so one move shifts the exponents by at most ~30.
// Throws newton_error after max_iters without reaching grad_tol.
Vec solve_g_implicit(Index row, const Vec& h, const DiscreteProblem& prob,
                     const Vec& init, const NewtonConfig& cfg);

}  // namespace evqr
