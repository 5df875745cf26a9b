#pragma once

#include <vector>

#include "evqr/dual.hpp"

namespace evqr {

// Moments of the conditional distribution over (x, y) atoms given u_i, under
// weights w_j proportional to b_j exp((f_i + <G_i,x_j> + h_j - C_ij)/eps).
struct ConditionalMoments {
  Vec mean_y;  // sum_j w_j y_j
  Mat xx;      // sum_j w_j x_j x_j^T
  Mat xy;      // sum_j w_j x_j y_j^T
};

// Intended for post-step triples (f^{t+1}, G^t, h^{t+1}), whose conditional
// weights already sum to one per row; weights are renormalized regardless.
ConditionalMoments conditional_moments(const Potentials& p,
                                       const DiscreteProblem& prob, Index i);

// Per-row derivative estimates: B0 row i is the conditional mean of y,
// B1[i] = xx^{-1} xy. Rows whose conditional second moment has an eigenvalue
// below lambda_tol_rel * tr(Sigma_X-scale) are flagged degenerate and get
// B1[i] = 0.
struct BEstimates {
  Mat B0;                // m x d_y
  std::vector<Mat> B1;   // m entries, d_x x d_y each
  std::vector<bool> degenerate;
};

BEstimates b_estimators(const Potentials& p, const DiscreteProblem& prob,
                        double lambda_tol_rel = 1e-10);

// L2(a) distance between two B1 stacks (successive-iterate stability metric).
double b1_distance(const BEstimates& lhs, const BEstimates& rhs, const Vec& a);

}  // namespace evqr
