#include <cmath>

#include "doctest.h"
#include "evqr/bounds.hpp"
#include "evqr/dual.hpp"
#include "evqr/solver.hpp"
#include "test_util.hpp"

using namespace evqr;
using testutil::canonical_m1;
using testutil::random_problem;
using testutil::tiny_degenerate;
using testutil::tiny_nondegenerate;

namespace {

SolverConfig modified_cfg(double eps, double eta, double tol, int iters) {
  SolverConfig cfg;
  cfg.epsilon = eps;
  cfg.mode = SolverMode::modified;
  cfg.eta = eta;
  cfg.tol = tol;
  cfg.max_iters = iters;
  return cfg;
}

}  // namespace

TEST_CASE("two-atom instance: one projected-gradient sweep is exact") {
  const DiscreteProblem prob = canonical_m1();
  const SolverConfig cfg = modified_cfg(1.0, 1.0, 1e-10, 10);
  ProjectionConfig pcfg;
  pcfg.radius = 2.0;

  StepDiagnostics diag;
  const Potentials p1 =
      modified_step(zero_potentials(prob), prob, cfg, pcfg, &diag);

  // Hand trace: h-half = (0, 1/2), f-half = 0, shift 0, gradient in G = 0.
  CHECK(std::abs(p1.f(0)) <= 1e-14);
  CHECK(std::abs(p1.G(0, 0)) <= 1e-14);
  CHECK(p1.h(0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(p1.h(1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(diag.row_marginal_err <= 1e-14);
  CHECK(diag.d_g.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(dual_objective(p1, prob) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("phase coupling has exact row marginals") {
  for (std::uint64_t seed : {101, 102}) {
    const DiscreteProblem prob = random_problem(6, 9, 2, 1, 1.0, seed);
    const SolverConfig cfg = modified_cfg(1.0, 1.0, 0.0, 1);
    ProjectionConfig pcfg;
    pcfg.radius = 1.0;
    Potentials p = zero_potentials(prob);
    for (int t = 0; t < 4; ++t) {
      StepDiagnostics diag;
      const Potentials next = modified_step(p, prob, cfg, pcfg, &diag);
      CHECK(diag.row_marginal_err <= 1e-12);

      // The postcondition names the mixed phase: new f and h, old G.
      Potentials phase = next;
      phase.G = p.G;
      const Residuals res = residuals(coupling(phase, prob), prob);
      CHECK(res.row <= 1e-12);
      p = next;
    }
  }
}

TEST_CASE("agrees with the exact-solve optimum on the rational fixture") {
  const DiscreteProblem prob = tiny_degenerate();
  const SolverConfig cfg = modified_cfg(prob.epsilon, prob.epsilon, 1e-10, 200);
  ProjectionConfig pcfg;
  pcfg.radius = optimal_potential_bounds(prob)[1];
  const SolveResult run =
      run_modified(prob, cfg, pcfg, zero_potentials(prob));
  REQUIRE(run.converged);
  CHECK(dual_objective(run.potentials, prob) ==
        doctest::Approx(0.165625).epsilon(1e-11));

  SolverConfig vcfg;
  vcfg.epsilon = prob.epsilon;
  vcfg.tol = 1e-10;
  vcfg.max_iters = 100;
  NewtonConfig ncfg;
  ncfg.grad_tol = 1e-12;
  const SolveResult van = run_vanilla(prob, vcfg, ncfg);
  REQUIRE(van.converged);
  CHECK(potentials_dist_sq(run.potentials, van.potentials, prob) <= 1e-12);
}

TEST_CASE("naive exponential mode reproduces the log-domain path") {
  const DiscreteProblem prob = tiny_nondegenerate();
  SolverConfig cfg = modified_cfg(prob.epsilon, prob.epsilon, 1e-14, 15);
  ProjectionConfig pcfg;
  pcfg.radius = 2.0;

  const SolveResult shifted =
      run_modified(prob, cfg, pcfg, zero_potentials(prob));
  cfg.naive_exp = true;
  const SolveResult naive =
      run_modified(prob, cfg, pcfg, zero_potentials(prob));

  REQUIRE(shifted.trace.rows.size() == naive.trace.rows.size());
  for (std::size_t k = 0; k < shifted.trace.rows.size(); ++k)
    CHECK(shifted.trace.rows[k].dual ==
          doctest::Approx(naive.trace.rows[k].dual).epsilon(1e-12));
  CHECK(potentials_dist_sq(shifted.potentials, naive.potentials, prob) <=
        1e-24);
}

TEST_CASE("guarded step size gives a monotone dual") {
  const DiscreteProblem prob = tiny_degenerate();
  const double radius = optimal_potential_bounds(prob)[1];
  const EtaChoice guard = default_eta(prob, radius);
  const SolverConfig cfg =
      modified_cfg(prob.epsilon, guard.value, 1e-13, 25);
  ProjectionConfig pcfg;
  pcfg.radius = radius;
  const SolveResult run =
      run_modified(prob, cfg, pcfg, zero_potentials(prob));
  const auto& rows = run.trace.rows;
  REQUIRE(rows.size() >= 10);
  for (std::size_t k = 1; k < rows.size(); ++k)
    CHECK(rows[k].dual >= rows[k - 1].dual - 1e-12 * (1.0 + std::abs(rows[k].dual)));
}

TEST_CASE("zero step size freezes G and still lifts the dual") {
  const DiscreteProblem prob = tiny_degenerate();
  const SolverConfig cfg = modified_cfg(prob.epsilon, 0.0, 1e-10, 20);
  ProjectionConfig pcfg;
  pcfg.radius = 1.0;
  const SolveResult run =
      run_modified(prob, cfg, pcfg, zero_potentials(prob));
  CHECK_FALSE(run.converged);  // g* != 0 here, so the floor stays high
  for (const TraceRow& row : run.trace.rows) CHECK(row.g_sup == 0.0);
  for (std::size_t k = 1; k < run.trace.rows.size(); ++k)
    CHECK(run.trace.rows[k].dual >= run.trace.rows[k - 1].dual - 1e-12);
}

TEST_CASE("the optimum is a fixed point when the ball contains it") {
  const DiscreteProblem prob = tiny_nondegenerate();
  SolverConfig vcfg;
  vcfg.epsilon = prob.epsilon;
  vcfg.tol = 1e-10;
  vcfg.max_iters = 300;
  NewtonConfig ncfg;
  ncfg.grad_tol = 1e-12;
  const SolveResult van = run_vanilla(prob, vcfg, ncfg);
  REQUIRE(van.converged);

  const SolverConfig cfg = modified_cfg(prob.epsilon, prob.epsilon, 1e-10, 1);
  ProjectionConfig pcfg;
  pcfg.radius = 0.5;  // max row norm at the optimum is ~0.3
  const Potentials next = modified_step(van.potentials, prob, cfg, pcfg);
  CHECK(std::sqrt(potentials_dist_sq(next, van.potentials, prob)) <= 1e-8);
}

TEST_CASE("iterates respect the projection radius") {
  const DiscreteProblem prob = random_problem(6, 8, 2, 1, 1.0, 111);
  const SolverConfig cfg = modified_cfg(1.0, 1.0, 1e-12, 30);
  ProjectionConfig pcfg;
  pcfg.radius = 0.1;
  const SolveResult run =
      run_modified(prob, cfg, pcfg, zero_potentials(prob));
  for (const TraceRow& row : run.trace.rows)
    CHECK(row.g_sup <= 0.1 + 1e-12);
}

TEST_CASE("trace header carries the run configuration") {
  const DiscreteProblem prob = tiny_degenerate();
  SolverConfig cfg = modified_cfg(prob.epsilon, prob.epsilon, 1e-10, 15);
  ProjectionConfig pcfg;
  pcfg.radius = 1.25;

  const SolveResult run =
      run_modified(prob, cfg, pcfg, zero_potentials(prob));
  const TraceHeader& hd = run.trace.header;
  CHECK(hd.mode == "modified");
  REQUIRE(hd.eta.has_value());
  CHECK(*hd.eta == prob.epsilon);
  REQUIRE(hd.radius.has_value());
  CHECK(*hd.radius == 1.25);
  CHECK(hd.projection == "ball");
  CHECK_FALSE(hd.eta_guard_ok);  // eta = eps is far above the guard here
  CHECK(hd.bounds.radius == 1.25);
  CHECK(hd.bounds.eta == prob.epsilon);
  CHECK(hd.seed == 0);
  CHECK(hd.generator.empty());

  for (std::size_t k = 1; k < run.trace.rows.size(); ++k)
    REQUIRE(run.trace.rows[k].g_displacement.has_value());

  pcfg.variant = ProjectionVariant::coordinatewise_box;
  const SolveResult box =
      run_modified(prob, cfg, pcfg, zero_potentials(prob));
  CHECK(box.trace.header.projection == "box");
  // One covariate dimension: ball and box projections coincide.
  CHECK(potentials_dist_sq(box.potentials, run.potentials, prob) <= 1e-18);
}

TEST_CASE("auto-resolved run picks eta = eps and the optimal-bound radius") {
  const DiscreteProblem prob = tiny_degenerate();
  SolverConfig cfg;
  cfg.epsilon = prob.epsilon;
  cfg.mode = SolverMode::modified;
  cfg.tol = 1e-10;
  cfg.max_iters = 200;
  const SolveResult run = run_modified(prob, cfg);
  const TraceHeader& hd = run.trace.header;
  REQUIRE(hd.eta.has_value());
  CHECK(*hd.eta == prob.epsilon);
  REQUIRE(hd.radius.has_value());
  CHECK(*hd.radius == doctest::Approx(4.648744172973063).epsilon(1e-13));
  CHECK(run.converged);
}
