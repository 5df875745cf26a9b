#pragma once

#include "evqr/types.hpp"

namespace evqr {

// Cost matrix C_ij = ||u_i - y_j||^2 / 2 together with the scalar statistics
// the bound calculators need.
struct CostInfo {
  Mat C;
  double c_inf = 0.0;   // max_ij C_ij
  double L_c = 0.0;     // max_j ||y_j|| + max_i ||u_i||
  double diam_u = 0.0;  // diameter of the u-atom set
};
CostInfo compute_cost_matrix(const Mat& U, const Mat& Y);

// Discrete problem data: reference atoms (U, a), joint atoms (X, Y, b),
// regularization epsilon, and the precomputed cost matrix.
//
// Invariants (enforced by make_problem, assumed by every solver routine):
//   a >= 0, sum a = 1; b >= 0, sum b = 1
//   sum_j b_j X_j = 0 (covariates centered under b)
//   Sigma_X = sum_j b_j X_j X_j^T has smallest eigenvalue >= lambda_tol
struct DiscreteProblem {
  Mat U;
  Vec a;
  Mat X;
  Mat Y;
  Vec b;
  double epsilon = 1.0;
  Mat C;
  double c_inf = 0.0;
  double L_c = 0.0;
  double diam_u = 0.0;

  Index m() const { return U.rows(); }
  Index n() const { return X.rows(); }
  Index dx() const { return X.cols(); }
  Index dy() const { return U.cols(); }
};

// Validated construction: normalizes the weights, centers X under b, checks
// that Sigma_X is nondegenerate (smallest eigenvalue >= lambda_tol_rel *
// trace), and builds the cost matrix. Throws std::invalid_argument on
// dimension mismatches, bad weights, or a degenerate covariate matrix.
DiscreteProblem make_problem(Mat U, Vec a, Mat X, Mat Y, Vec b, double epsilon,
                             double lambda_tol_rel = 1e-10);

// b-weighted second moment sum_j b_j X_j X_j^T of the stored covariates.
Mat second_moment(const DiscreteProblem& prob);

}  // namespace evqr
