#include "evqr/problem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace evqr {

CostInfo compute_cost_matrix(const Mat& U, const Mat& Y) {
  if (U.cols() != Y.cols())
    throw std::invalid_argument("compute_cost_matrix: U and Y disagree on d_y");
  const Index m = U.rows(), n = Y.rows();
  CostInfo info;
  info.C.resize(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      info.C(i, j) = 0.5 * (U.row(i) - Y.row(j)).squaredNorm();
  info.c_inf = (m > 0 && n > 0) ? info.C.maxCoeff() : 0.0;
  double max_u = 0.0, max_y = 0.0;
  for (Index i = 0; i < m; ++i) max_u = std::max(max_u, U.row(i).norm());
  for (Index j = 0; j < n; ++j) max_y = std::max(max_y, Y.row(j).norm());
  info.L_c = max_u + max_y;
  for (Index i = 0; i < m; ++i)
    for (Index k = i + 1; k < m; ++k)
      info.diam_u = std::max(info.diam_u, (U.row(i) - U.row(k)).norm());
  return info;
}

DiscreteProblem make_problem(Mat U, Vec a, Mat X, Mat Y, Vec b, double epsilon,
                             double lambda_tol_rel) {
  if (U.rows() != a.size())
    throw std::invalid_argument("make_problem: U rows and a length differ");
  if (X.rows() != b.size() || Y.rows() != b.size())
    throw std::invalid_argument("make_problem: X/Y rows and b length differ");
  if (U.cols() != Y.cols())
    throw std::invalid_argument("make_problem: U and Y disagree on d_y");
  if (U.rows() < 1 || X.rows() < 1 || X.cols() < 1)
    throw std::invalid_argument("make_problem: empty marginal");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("make_problem: epsilon must be positive");
  if (!U.allFinite() || !a.allFinite() || !X.allFinite() || !Y.allFinite() ||
      !b.allFinite())
    throw std::invalid_argument("make_problem: non-finite input");
  if ((a.array() < 0.0).any() || (b.array() < 0.0).any())
    throw std::invalid_argument("make_problem: negative weight");

  const double a_sum = a.sum(), b_sum = b.sum();
  if (!(a_sum > 0.0) || !(b_sum > 0.0))
    throw std::invalid_argument("make_problem: weights sum to zero");
  a /= a_sum;
  b /= b_sum;

  // Center covariates under b so the mean-independence constraint is
  // consistent with E[X] = 0.
  const Vec mu_x = X.transpose() * b;
  X.rowwise() -= mu_x.transpose();

  Mat sigma = X.transpose() * b.asDiagonal() * X;
  Eigen::SelfAdjointEigenSolver<Mat> es(sigma);
  const double lambda_min = es.eigenvalues().minCoeff();
  const double lambda_tol = lambda_tol_rel * sigma.trace();
  if (!(lambda_min > 0.0) || lambda_min < lambda_tol)
    throw std::invalid_argument(
        "make_problem: degenerate covariates, smallest eigenvalue of Sigma_X "
        "is " +
        std::to_string(lambda_min) + " < tolerance " +
        std::to_string(lambda_tol));

  DiscreteProblem prob;
  CostInfo info = compute_cost_matrix(U, Y);
  prob.U = std::move(U);
  prob.a = std::move(a);
  prob.X = std::move(X);
  prob.Y = std::move(Y);
  prob.b = std::move(b);
  prob.epsilon = epsilon;
  prob.C = std::move(info.C);
  prob.c_inf = info.c_inf;
  prob.L_c = info.L_c;
  prob.diam_u = info.diam_u;
  return prob;
}

Mat second_moment(const DiscreteProblem& prob) {
  return prob.X.transpose() * prob.b.asDiagonal() * prob.X;
}

}  // namespace evqr
