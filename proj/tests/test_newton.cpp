#include <cmath>

#include "doctest.h"
#include "evqr/newton.hpp"
#include "evqr/rng.hpp"
#include "test_util.hpp"

using namespace evqr;

namespace {

// One-row problem with the C row specified directly, bypassing the cost
// formula; the implicit solve only reads X, b, C.row, epsilon.
DiscreteProblem hand_problem(const Mat& X, const Vec& b, const Vec& c_row,
                             double eps) {
  DiscreteProblem prob;
  prob.U = Mat::Zero(1, 1);
  prob.a = Vec::Ones(1);
  prob.X = X;
  prob.Y = Mat::Zero(X.rows(), 1);
  prob.b = b;
  prob.C = c_row.transpose();
  prob.epsilon = eps;
  prob.c_inf = c_row.cwiseAbs().maxCoeff();
  prob.L_c = 1.0;
  prob.diam_u = 0.0;
  return prob;
}

// Normalized residual: norm of the tilted mean of x.
double tilted_residual(const Vec& g, Index row, const Vec& h,
                       const DiscreteProblem& prob) {
  const Index n = prob.n();
  Vec e(n);
  for (Index j = 0; j < n; ++j)
    e(j) = (prob.X.row(j).dot(g) + h(j) - prob.C(row, j)) / prob.epsilon;
  const double mx = e.maxCoeff();
  double z = 0.0;
  Vec mean = Vec::Zero(prob.dx());
  for (Index j = 0; j < n; ++j) {
    const double w = prob.b(j) * std::exp(e(j) - mx);
    z += w;
    mean += w * prob.X.row(j).transpose();
  }
  return (mean / z).norm();
}

Mat pm_one() {
  Mat X(2, 1);
  X << -1.0, 1.0;
  return X;
}

}  // namespace

TEST_CASE("symmetric atoms need no tilt") {
  const Vec b = Vec::Constant(2, 0.5);
  Vec c(2);
  c << 0.3, 0.3;
  const DiscreteProblem prob = hand_problem(pm_one(), b, c, 1.0);
  const Vec h = Vec::Zero(2);
  const Vec g = solve_g_implicit(0, h, prob, Vec::Zero(1), NewtonConfig{});
  CHECK(std::abs(g(0)) <= 1e-12);
}

TEST_CASE("cost asymmetry: solves exp(g - 1/2) = exp(-g)") {
  const Vec b = Vec::Constant(2, 0.5);
  Vec c(2);
  c << 0.0, 0.5;
  const DiscreteProblem prob = hand_problem(pm_one(), b, c, 1.0);
  const Vec h = Vec::Zero(2);
  const Vec g = solve_g_implicit(0, h, prob, Vec::Zero(1), NewtonConfig{});
  CHECK(g(0) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("weight asymmetry: solves exp(2g) = 2") {
  Vec b(2);
  b << 2.0 / 3.0, 1.0 / 3.0;
  const Vec c = Vec::Zero(2);
  const DiscreteProblem prob = hand_problem(pm_one(), b, c, 1.0);
  const Vec h = Vec::Zero(2);
  const Vec g = solve_g_implicit(0, h, prob, Vec::Zero(1), NewtonConfig{});
  CHECK(g(0) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("matches scalar bisection on random one-dimensional rows") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(2000 + seed);
    const Index n = 5 + seed % 4;
    Mat X(n, 1);
    Vec b(n), c(n), h(n);
    for (Index j = 0; j < n; ++j) {
      X(j, 0) = rng.normal();
      b(j) = 0.2 + rng.uniform();
      c(j) = 0.5 * rng.normal();
      h(j) = 0.5 * rng.normal();
    }
    X.array() -= (X.transpose() * b).value() / b.sum();  // keep both signs
    if (X.col(0).maxCoeff() <= 0.0 || X.col(0).minCoeff() >= 0.0) continue;
    b /= b.sum();
    const double eps = (seed % 2 == 0) ? 1.0 : 0.5;
    const DiscreteProblem prob = hand_problem(X, b, c, eps);

    NewtonConfig cfg;
    cfg.grad_tol = 1e-12;
    const Vec g = solve_g_implicit(0, h, prob, Vec::Zero(1), cfg);
    const double oracle = testutil::bisect_g_solve(0, h, prob);
    CHECK(std::abs(g(0) - oracle) <= 1e-8);
    CHECK(tilted_residual(g, 0, h, prob) <= cfg.grad_tol);
  }
}

TEST_CASE("multidimensional rows: residual tolerance and uniqueness") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Rng rng(3000 + seed);
    const Index n = 8, dx = 2 + seed % 2;
    Mat X(n, dx);
    Vec b(n), c(n), h(n);
    for (Index j = 0; j < n; ++j) {
      for (Index k = 0; k < dx; ++k) X(j, k) = rng.normal();
      b(j) = 0.2 + rng.uniform();
      c(j) = 0.5 * rng.normal();
      h(j) = 0.5 * rng.normal();
    }
    b /= b.sum();
    const DiscreteProblem prob = hand_problem(X, b, c, 1.0);

    NewtonConfig cfg;
    cfg.grad_tol = 1e-11;
    const Vec g0 = solve_g_implicit(0, h, prob, Vec::Zero(dx), cfg);
    CHECK(tilted_residual(g0, 0, h, prob) <= cfg.grad_tol);

    Vec other(dx);
    for (Index k = 0; k < dx; ++k) other(k) = rng.normal();
    const Vec g1 = solve_g_implicit(0, h, prob, other, cfg);
    CHECK((g0 - g1).norm() <= 1e-8);  // strictly convex: unique solution

    // A wild start may legitimately fail to converge, but the contract is a
    // typed error or the right answer, never a silent bad vector.
    Vec wild(dx);
    for (Index k = 0; k < dx; ++k) wild(k) = 5.0 * rng.normal();
    try {
      const Vec g2 = solve_g_implicit(0, h, prob, wild, cfg);
      CHECK(g2.allFinite());
      CHECK(tilted_residual(g2, 0, h, prob) <= cfg.grad_tol);
    } catch (const newton_error& e) {
      CHECK(std::isfinite(e.residual));
    }
  }
}

TEST_CASE("warm start at the solution is a fixed point") {
  Rng rng(4000);
  Mat X(6, 2);
  Vec b(6), c(6), h(6);
  for (Index j = 0; j < 6; ++j) {
    X(j, 0) = rng.normal();
    X(j, 1) = rng.normal();
    b(j) = 1.0 / 6.0;
    c(j) = 0.3 * rng.normal();
    h(j) = 0.3 * rng.normal();
  }
  const DiscreteProblem prob = hand_problem(X, b, c, 1.0);
  NewtonConfig cfg;
  cfg.grad_tol = 1e-12;
  const Vec g = solve_g_implicit(0, h, prob, Vec::Zero(2), cfg);
  const Vec again = solve_g_implicit(0, h, prob, g, cfg);
  CHECK((g - again).norm() <= 1e-12);
}

TEST_CASE("iteration cap raises a typed error with diagnostics") {
  const Vec b = Vec::Constant(2, 0.5);
  Vec c(2);
  c << 0.0, 0.5;
  const DiscreteProblem prob = hand_problem(pm_one(), b, c, 1.0);
  const Vec h = Vec::Zero(2);
  NewtonConfig cfg;
  cfg.max_iters = 1;
  cfg.grad_tol = 1e-15;
  Vec far(1);
  far << 40.0;
  try {
    solve_g_implicit(0, h, prob, far, cfg);
    FAIL("expected newton_error");
  } catch (const newton_error& e) {
    CHECK(e.row == 0);
    CHECK(e.residual > 0.0);
  }
}
