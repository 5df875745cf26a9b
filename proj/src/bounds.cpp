#include "evqr/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace evqr {

namespace {

constexpr double kLog32 = 0.4054651081081644;  // log(3/2)

struct Stats {
  double M_x_raw, M_x, lambda_min, sigma_inv_op;
};

Stats stats(const DiscreteProblem& prob) {
  Stats s{};
  for (Index j = 0; j < prob.n(); ++j)
    s.M_x_raw = std::max(s.M_x_raw, prob.X.row(j).norm());
  s.M_x = std::max(1.0, s.M_x_raw);
  Eigen::SelfAdjointEigenSolver<Mat> es(second_moment(prob));
  s.lambda_min = es.eigenvalues().minCoeff();
  if (!(s.lambda_min > 0.0))
    throw std::invalid_argument("bounds: singular Sigma_X");
  s.sigma_inv_op = 1.0 / s.lambda_min;
  return s;
}

}  // namespace

std::array<double, 3> optimal_potential_bounds(const DiscreteProblem& prob) {
  const Stats s = stats(prob);
  const double bound_f = prob.c_inf;
  const double bound_g = 2.0 * s.sigma_inv_op * s.M_x *
                         (2.5 * prob.c_inf + prob.epsilon * kLog32);
  const double bound_h = prob.c_inf + bound_g * s.M_x;
  return {bound_f, bound_g, bound_h};
}

std::array<double, 4> vanilla_iterate_bounds(const DiscreteProblem& prob,
                                             double D0, double h0_inf) {
  const Stats s = stats(prob);
  const double K_f =
      prob.L_c * prob.diam_u + prob.c_inf + std::max(-D0, 0.0) + h0_inf;
  const double K_g = 4.0 * s.sigma_inv_op * s.M_x *
                     (4.0 * prob.c_inf - 1.5 * D0 + K_f + h0_inf +
                      prob.epsilon * kLog32);
  const double K_h = prob.c_inf + K_f + K_g * s.M_x;
  const double K_bar = K_f + K_g * s.M_x + K_h + prob.c_inf;
  return {K_f, K_g, K_h, K_bar};
}

std::array<double, 3> modified_iterate_bounds(const DiscreteProblem& prob,
                                              double radius, double D0,
                                              double f0_inf) {
  const Stats s = stats(prob);
  const double K_hat_f =
      prob.L_c * prob.diam_u + 2.0 * radius * s.M_x + prob.c_inf - D0;
  const double K_hat_h = 2.0 * prob.c_inf + std::max(K_hat_f, f0_inf) +
                         radius * s.M_x - D0;
  const double K_bar_star = K_hat_f + radius * s.M_x + K_hat_h + prob.c_inf;
  return {K_hat_f, K_hat_h, K_bar_star};
}

ContractionRates contraction_rates(const ProblemBounds& bounds, double eta) {
  const double eps = bounds.epsilon;
  const double lam = std::min(1.0, bounds.lambda_min);
  const double M = bounds.M_x;

  ContractionRates out;
  out.tau = lam * lam * std::exp(-5.0 * bounds.K_bar / eps) / (3.0 * M * M);

  // theta = eps/eta; eta = 0 is the frozen-G limit, theta = +inf.
  const double theta =
      eta > 0.0 ? eps / eta : std::numeric_limits<double>::infinity();
  const double log_pen = std::log(M * M) + 2.0 * bounds.radius * M / eps;
  const double bracket_a = std::exp(-2.0 * bounds.K_hat_h / eps);
  double bracket_b;
  if (std::isinf(theta))
    bracket_b = std::numeric_limits<double>::infinity();
  else
    bracket_b = theta - std::exp(log_pen);
  if (!(bracket_b > 0.0)) {
    out.tau_hat = 0.0;
    out.guard_ok = false;
    return out;
  }
  out.guard_ok = true;
  const double bracket = std::min(bracket_a, bracket_b);
  const double denom =
      2.0 * theta * theta +
      5.0 * std::pow(M, 4) * std::exp(2.0 * bounds.K_bar_star / eps);
  out.tau_hat = lam * std::exp(-bounds.K_bar_star / eps) * bracket / denom;
  if (!std::isfinite(out.tau_hat)) out.tau_hat = 0.0;  // denom overflow
  return out;
}

double pl_constant(const ProblemBounds& bounds) {
  const double lam = std::min(1.0, bounds.lambda_min);
  return 2.0 * lam * std::exp(-bounds.K_bar / bounds.epsilon) / bounds.epsilon;
}

ProblemBounds problem_bounds(const DiscreteProblem& prob, double radius,
                             double eta, double D0, double h0_inf,
                             double f0_inf) {
  const Stats s = stats(prob);
  ProblemBounds b;
  b.M_x = s.M_x;
  b.M_x_raw = s.M_x_raw;
  b.c_inf = prob.c_inf;
  b.L_c = prob.L_c;
  b.diam_u = prob.diam_u;
  b.lambda_min = s.lambda_min;
  b.sigma_inv_op = s.sigma_inv_op;
  b.epsilon = prob.epsilon;

  const auto opt = optimal_potential_bounds(prob);
  b.K_bar_f = opt[0];
  b.K_bar_g = opt[1];
  b.K_bar_h = opt[2];

  b.D0 = D0;
  b.h0_inf = h0_inf;
  b.f0_inf = f0_inf;
  const auto van = vanilla_iterate_bounds(prob, D0, h0_inf);
  b.K_f = van[0];
  b.K_g = van[1];
  b.K_h = van[2];
  b.K_bar = van[3];

  b.radius = radius;
  const auto mod = modified_iterate_bounds(prob, radius, D0, f0_inf);
  b.K_hat_f = mod[0];
  b.K_hat_h = mod[1];
  b.K_bar_star = mod[2];

  b.eta = eta;
  const ContractionRates rates = contraction_rates(b, eta);
  b.tau = rates.tau;
  b.tau_hat = rates.tau_hat;
  b.tau_hat_guard_ok = rates.guard_ok;

  // Step-size guard value eps / (M_x^2 e^{2 radius M_x / eps}); underflows to
  // 0 for large radii, which is taken literally by the guarded default.
  b.eta_guard =
      prob.epsilon /
      (s.M_x * s.M_x * std::exp(2.0 * radius * s.M_x / prob.epsilon));
  return b;
}

}  // namespace evqr
