#pragma once

#include <array>

#include "evqr/problem.hpp"

namespace evqr {

// Every closed-form constant the theory provides for a concrete problem,
// given a projection radius, step size, and initialization. Used for
// auto-configuration and for bound-verification tests; serialized into the
// trace header.
struct ProblemBounds {
  // Problem statistics. M_x is floored at 1 inside every bound/rate formula
  // (all of them are nondecreasing in M_x, so the floor keeps them valid);
  // M_x_raw is the actual max ||x_j||.
  double M_x = 1.0;
  double M_x_raw = 0.0;
  double c_inf = 0.0;
  double L_c = 0.0;
  double diam_u = 0.0;
  double lambda_min = 0.0;    // smallest eigenvalue of Sigma_X
  double sigma_inv_op = 0.0;  // ||Sigma_X^{-1}||_op = 1/lambda_min
  double epsilon = 1.0;

  // Bounds on the optimal normalized potentials.
  double K_bar_f = 0.0, K_bar_g = 0.0, K_bar_h = 0.0;

  // Initialization data the iterate bounds were computed from.
  double D0 = 0.0, h0_inf = 0.0, f0_inf = 0.0;

  // Exact-solve iterate bounds and their aggregate K_bar.
  double K_f = 0.0, K_g = 0.0, K_h = 0.0, K_bar = 0.0;

  // Projected-gradient iterate bounds for the given radius (= K_hat_g).
  double radius = 0.0;
  double K_hat_f = 0.0, K_hat_h = 0.0, K_bar_star = 0.0;

  // Contraction rates for the given eta, plus the step-size guard value
  // eps / (M_x^2 e^{2 radius M_x / eps}); tau_hat is 0 with guard_ok = false
  // when the rate's bracket term is non-positive.
  double eta = 0.0;
  double tau = 0.0;
  double tau_hat = 0.0;
  bool tau_hat_guard_ok = false;
  double eta_guard = 0.0;
};

struct ContractionRates {
  double tau = 0.0;
  double tau_hat = 0.0;
  bool guard_ok = false;
};

// (bound_f, bound_g, bound_h) for the optimal normalized potentials:
//   bound_f = ||c||_inf
//   bound_g = 2 ||Sigma_X^{-1}|| M_x (5/2 ||c||_inf + eps log(3/2))
//   bound_h = ||c||_inf + bound_g M_x
std::array<double, 3> optimal_potential_bounds(const DiscreteProblem& prob);

// (K_f, K_g, K_h, K_bar) for exact-solve iterates from an init with dual
// value D0 and ||h^0||_inf = h0_inf:
//   K_f = L_c diam(U) + ||c||_inf + max(-D0, 0) + h0_inf
//   K_g = 4 ||Sigma_X^{-1}|| M_x (4||c||_inf - 3/2 D0 + K_f + h0_inf
//                                 + eps log(3/2))
//   K_h = ||c||_inf + K_f + K_g M_x
//   K_bar = K_f + K_g M_x + K_h + ||c||_inf
std::array<double, 4> vanilla_iterate_bounds(const DiscreteProblem& prob,
                                             double D0, double h0_inf);

// (K_hat_f, K_hat_h, K_bar_star) for projected-gradient iterates with the
// given radius, from an init with dual value D0 and ||f^0||_inf = f0_inf:
//   K_hat_f = L_c diam(U) + 2 radius M_x + ||c||_inf - D0
//   K_hat_h = 2||c||_inf + max(K_hat_f, f0_inf) + radius M_x - D0
//   K_bar_star = K_hat_f + radius M_x + K_hat_h + ||c||_inf
std::array<double, 3> modified_iterate_bounds(const DiscreteProblem& prob,
                                              double radius, double D0,
                                              double f0_inf);

// tau = (1 ^ lambda)^2 e^{-5 K_bar / eps} / (3 M_x^2) and
// tau_hat = (1 ^ lambda) e^{-K_bar_star/eps}
//           min(e^{-2 K_hat_h/eps}, theta - M_x^2 e^{2 radius M_x/eps})
//           / (2 theta^2 + 5 M_x^4 e^{2 K_bar_star/eps}),   theta = eps/eta.
// Requires the bounds struct populated through the iterate bounds; eta = 0 is
// treated as theta = +inf (frozen-G limit, tau_hat = 0 with guard intact).
ContractionRates contraction_rates(const ProblemBounds& bounds, double eta);

// PL constant 2 (1 ^ lambda) e^{-K_bar/eps} / eps (diagnostic).
double pl_constant(const ProblemBounds& bounds);

// Assembles the full struct for a problem, radius, eta, and init data.
ProblemBounds problem_bounds(const DiscreteProblem& prob, double radius,
                             double eta, double D0, double h0_inf,
                             double f0_inf);

}  // namespace evqr
