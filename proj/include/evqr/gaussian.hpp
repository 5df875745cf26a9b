#pragma once

#include <cstdint>

#include "evqr/problem.hpp"

namespace evqr {

// Jointly Gaussian (X, Y) with E[X] = 0, E[Y] = m_Y, against a standard
// Gaussian reference on the Y side.
struct GaussianModel {
  Vec m_Y;
  Mat Sigma_XX;
  Mat Sigma_XY;  // d_x x d_y
  Mat Sigma_YY;
  double epsilon = 1.0;
};

// Throws std::invalid_argument unless the full covariance
// [[Sigma_XX, Sigma_XY], [Sigma_XY^T, Sigma_YY]] and the Schur complement
// Sigma_YY - Sigma_YX Sigma_XX^{-1} Sigma_XY are positive definite.
void validate(const GaussianModel& model);

// Closed-form optimal dual value: with S the Schur complement and
// Lambda = (S + eps^2/4 I)^{1/2} - eps/2 I,
//   d_y/2 - tr(Lambda) + tr(Sigma_YY)/2 + ||m_Y||^2/2
//   - eps/2 logdet(eps Lambda S^{-1}).
// Lambda and S^{-1} commute, so everything reduces to the eigenvalues of S.
double gaussian_dual_value(const GaussianModel& model);

// Draws m reference atoms from the standard d_y-Gaussian and n joint (X, Y)
// atoms from the model (lower-Cholesky transform of the full covariance),
// uniform weights, X centered under b. Bit-identical for equal seeds; draw
// order is documented in the README. Throws when the sampled covariates are
// degenerate (e.g. n = 1, which centers to zero).
DiscreteProblem sample_gaussian_problem(const GaussianModel& model, Index m,
                                        Index n, std::uint64_t seed);

}  // namespace evqr
