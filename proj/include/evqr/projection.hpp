#pragma once

#include "evqr/types.hpp"

namespace evqr {

enum class ProjectionVariant { joint_ball, coordinatewise_box };

struct ProjectionConfig {
  double radius = 1.0;  // ball radius K
  double tol = 1e-12;   // stop when ||v_next - v|| <= tol (1 + ||v||)
  int max_iters = 200;
  ProjectionVariant variant = ProjectionVariant::joint_ball;
  double post_tol = 1e-10;  // required ||a-weighted mean of output||
};

struct ProjectionResult {
  Mat G;
  Vec shift;          // v* (joint ball) or per-coordinate shifts (box)
  bool converged = true;
  bool objective_monotone = true;  // Huber objective decreased every sweep
  int iters = 0;
  double mean_residual = 0.0;  // achieved ||sum_i a_i G_i||
};

// Huber function: ||x||^2/2 inside the delta-ball, delta ||x|| - delta^2/2
// outside; C1 across the boundary.
double huber(const Vec& x, double delta);

// L2(a) projection onto {psi : ||psi_i|| <= K for all i, sum_i a_i psi_i = 0}.
// Rows become min(1, K/||G_i - v*||)(G_i - v*) where the shift v* is found by
// iterative reweighting of the a-weighted Huber center. Non-convergence
// returns the best iterate with converged = false and the achieved residual.
ProjectionResult project(const Mat& G, const Vec& a,
                         const ProjectionConfig& cfg);

// Per-coordinate variant: each column is clipped to [-K, K] after a scalar
// shift found by bisection so the a-weighted column mean is zero. Coincides
// with project when d_x = 1.
ProjectionResult project_coordinatewise(const Mat& G, const Vec& a,
                                        const ProjectionConfig& cfg);

// Dispatch on cfg.variant.
ProjectionResult project_variant(const Mat& G, const Vec& a,
                                 const ProjectionConfig& cfg);

}  // namespace evqr
