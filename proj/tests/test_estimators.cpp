#include <cmath>

#include "doctest.h"
#include "evqr/estimators.hpp"
#include "evqr/newton.hpp"
#include "evqr/solver.hpp"
#include "test_util.hpp"

using namespace evqr;
using testutil::random_potentials;
using testutil::random_problem;
using testutil::tiny_degenerate;

namespace {

// Straightforward re-computation of the conditional weights.
Vec reference_weights(const Potentials& p, const DiscreteProblem& prob,
                      Index i) {
  const Index n = prob.n();
  Vec e(n);
  for (Index j = 0; j < n; ++j)
    e(j) = (p.f(i) + prob.X.row(j).dot(p.G.row(i)) + p.h(j) - prob.C(i, j)) /
           prob.epsilon;
  const double mx = e.maxCoeff();
  Vec w(n);
  for (Index j = 0; j < n; ++j) w(j) = prob.b(j) * std::exp(e(j) - mx);
  return w / w.sum();
}

}  // namespace

TEST_CASE("independent optimum: weights collapse to b") {
  // At this fixture's optimum the coupling is the product measure, so the
  // conditional moments are plain b-weighted sums, computable by hand.
  const DiscreteProblem prob = tiny_degenerate();
  SolverConfig cfg;
  cfg.epsilon = prob.epsilon;
  cfg.tol = 1e-10;
  cfg.max_iters = 60;
  NewtonConfig ncfg;
  ncfg.grad_tol = 1e-12;
  const SolveResult run = run_vanilla(prob, cfg, ncfg);
  REQUIRE(run.converged);

  for (Index i = 0; i < prob.m(); ++i) {
    const ConditionalMoments mom =
        conditional_moments(run.potentials, prob, i);
    CHECK(mom.mean_y(0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(mom.xx(0, 0) == doctest::Approx(0.625).epsilon(1e-9));
    CHECK(mom.xy(0, 0) == doctest::Approx(0.3125).epsilon(1e-9));
  }

  const BEstimates est = b_estimators(run.potentials, prob);
  for (Index i = 0; i < prob.m(); ++i) {
    CHECK_FALSE(est.degenerate[i]);
    CHECK(est.B0(i, 0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(est.B1[i](0, 0) == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("moments match a direct reweighted sum") {
  for (std::uint64_t seed : {121, 122, 123}) {
    const DiscreteProblem prob = random_problem(5, 9, 2, 2, 1.0, seed);
    const Potentials p = random_potentials(prob, seed + 50, 0.6);
    for (Index i = 0; i < prob.m(); ++i) {
      const Vec w = reference_weights(p, prob, i);
      Vec mean_y = Vec::Zero(prob.dy());
      Mat xx = Mat::Zero(prob.dx(), prob.dx());
      Mat xy = Mat::Zero(prob.dx(), prob.dy());
      for (Index j = 0; j < prob.n(); ++j) {
        mean_y += w(j) * prob.Y.row(j).transpose();
        xx += w(j) * prob.X.row(j).transpose() * prob.X.row(j);
        xy += w(j) * prob.X.row(j).transpose() * prob.Y.row(j);
      }
      const ConditionalMoments mom = conditional_moments(p, prob, i);
      CHECK((mom.mean_y - mean_y).cwiseAbs().maxCoeff() <= 1e-13);
      CHECK((mom.xx - xx).cwiseAbs().maxCoeff() <= 1e-13);
      CHECK((mom.xy - xy).cwiseAbs().maxCoeff() <= 1e-13);
    }
  }
}

TEST_CASE("intercept estimates stay inside the response hull") {
  for (std::uint64_t seed : {131, 132}) {
    const DiscreteProblem prob = random_problem(6, 8, 2, 2, 1.0, seed);
    const Potentials p = random_potentials(prob, seed + 60, 0.8);
    const BEstimates est = b_estimators(p, prob);
    for (Index i = 0; i < prob.m(); ++i)
      for (Index k = 0; k < prob.dy(); ++k) {
        CHECK(est.B0(i, k) >= prob.Y.col(k).minCoeff() - 1e-12);
        CHECK(est.B0(i, k) <= prob.Y.col(k).maxCoeff() + 1e-12);
      }
  }
}

TEST_CASE("slope estimates solve the conditional normal equations") {
  const DiscreteProblem prob = random_problem(5, 10, 2, 1, 1.0, 141);
  const Potentials p = random_potentials(prob, 142, 0.5);
  const BEstimates est = b_estimators(p, prob);
  for (Index i = 0; i < prob.m(); ++i) {
    REQUIRE_FALSE(est.degenerate[i]);
    const ConditionalMoments mom = conditional_moments(p, prob, i);
    const Mat direct = mom.xx.fullPivLu().solve(mom.xy);
    CHECK((est.B1[i] - direct).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("rank-deficient conditional moments are flagged, not inverted") {
  // Covariates on a line: the conditional second moment is rank one. Such a
  // problem cannot pass construction-time validation, so fill the fields
  // directly; the estimators must cope.
  DiscreteProblem prob;
  prob.U = Mat::Zero(1, 1);
  prob.a = Vec::Ones(1);
  Mat X(4, 2);
  X << -1.0, -2.0, -0.5, -1.0, 0.5, 1.0, 1.0, 2.0;
  prob.X = X;
  Mat Y(4, 1);
  Y << 0.0, 0.25, 0.75, 1.0;
  prob.Y = Y;
  prob.b = Vec::Constant(4, 0.25);
  const CostInfo info = compute_cost_matrix(prob.U, Y);
  prob.C = info.C;
  prob.c_inf = info.c_inf;
  prob.L_c = info.L_c;
  prob.diam_u = info.diam_u;
  prob.epsilon = 1.0;

  const BEstimates est = b_estimators(zero_potentials(prob), prob);
  CHECK(est.degenerate[0]);
  CHECK(est.B1[0].cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::isfinite(est.B0(0, 0)));
}

TEST_CASE("an absurd relative floor flags every row") {
  const DiscreteProblem prob = random_problem(4, 8, 2, 1, 1.0, 151);
  const Potentials p = zero_potentials(prob);
  const BEstimates est = b_estimators(p, prob, /*lambda_tol_rel=*/10.0);
  for (Index i = 0; i < prob.m(); ++i) {
    CHECK(est.degenerate[i]);
    CHECK(est.B1[i].cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("zero potentials and flat cost leave the marginal moments") {
  DiscreteProblem prob = random_problem(4, 9, 2, 1, 1.0, 161);
  prob.C.setZero();  // no tilt at zero potentials: weights = b on every row
  const Mat sigma = prob.X.transpose() * prob.b.asDiagonal() * prob.X;
  const Mat sxy = prob.X.transpose() * prob.b.asDiagonal() * prob.Y;
  const Mat expected = sigma.fullPivLu().solve(sxy);
  const BEstimates est = b_estimators(zero_potentials(prob), prob);
  for (Index i = 0; i < prob.m(); ++i)
    CHECK((est.B1[i] - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("exactly linear data recovers the slope at every scale") {
  // y = 1/2 + 3/4 x on x = +-1. At any converged optimum the conditional
  // mean of x vanishes (the mean-independence constraint), so
  // B1 = E[xx]^-1 E[x y] = 3/4 and B0 = 1/2 up to the residual tolerance.
  Mat U(2, 1);
  U << -0.5, 0.5;
  const Vec a = Vec::Constant(2, 0.5);
  Mat X(2, 1);
  X << -1.0, 1.0;
  Mat Y(2, 1);
  Y << -0.25, 1.25;
  const Vec b = Vec::Constant(2, 0.5);

  double prev_err = std::numeric_limits<double>::infinity();
  for (double eps : {1.0, 0.1, 0.01}) {
    const DiscreteProblem prob = make_problem(U, a, X, Y, b, eps);
    SolverConfig cfg;
    cfg.epsilon = eps;
    cfg.tol = 1e-9;
    cfg.max_iters = 5000;
    NewtonConfig ncfg;
    ncfg.grad_tol = 1e-12;
    const SolveResult run = run_vanilla(prob, cfg, ncfg);
    REQUIRE(run.converged);
    const BEstimates est = b_estimators(run.potentials, prob);
    double err = 0.0;
    for (Index i = 0; i < prob.m(); ++i) {
      err = std::max(err, std::abs(est.B1[i](0, 0) - 0.75));
      CHECK(est.B0(i, 0) == doctest::Approx(0.5).epsilon(1e-6));
    }
    CHECK(err <= 1e-6);
    CHECK(err <= prev_err + 1e-9);
    prev_err = err;
  }
}

TEST_CASE("stability metric is a weighted Frobenius distance") {
  BEstimates lhs, rhs;
  lhs.B0 = Mat::Zero(2, 1);
  rhs.B0 = Mat::Zero(2, 1);
  lhs.B1 = {Mat::Constant(1, 1, 1.0), Mat::Constant(1, 1, 3.0)};
  rhs.B1 = {Mat::Constant(1, 1, 0.0), Mat::Constant(1, 1, 5.0)};
  lhs.degenerate = {false, false};
  rhs.degenerate = {false, false};
  Vec a(2);
  a << 0.25, 0.75;
  CHECK(b1_distance(lhs, rhs, a) ==
        doctest::Approx(std::sqrt(0.25 * 1.0 + 0.75 * 4.0)).epsilon(1e-15));
  CHECK(b1_distance(lhs, lhs, a) == 0.0);
}
