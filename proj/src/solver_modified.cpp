#include <cmath>

#include "evqr/logsumexp.hpp"
#include "evqr/solver.hpp"
#include "solver_detail.hpp"

namespace evqr {

namespace {

// -eps log sum_k w_k exp(e_k / eps), literal exponentials: the sums overflow
// or lose all precision exactly where the shifted path would have saved them.
double soft_min_naive(const Vec& e, const Vec& w, double eps) {
  Vec terms(e.size());
  for (Index k = 0; k < e.size(); ++k)
    terms(k) = w(k) * std::exp(e(k) / eps);
  return -eps * std::log(pairwise_sum(terms));
}

double soft_min_shifted(const Vec& e, const Vec& w, double eps) {
  return -eps * log_sum_exp_weighted(e / eps, w);
}

}  // namespace

Potentials modified_step(const Potentials& p, const DiscreteProblem& prob,
                         const SolverConfig& cfg, const ProjectionConfig& pcfg,
                         StepDiagnostics* diag) {
  const Index m = prob.m(), n = prob.n();
  const double eps = prob.epsilon;
  const double eta = cfg.eta ? *cfg.eta : prob.epsilon;
  const auto soft_min = cfg.naive_exp ? soft_min_naive : soft_min_shifted;

  // T_ij = <G_i, x_j> - C_ij at the incoming G.
  const Mat T = p.G * prob.X.transpose() - prob.C;

  Vec h_half(n);
  for (Index j = 0; j < n; ++j)
    h_half(j) = soft_min(p.f + T.col(j), prob.a, eps);

  Vec f_half(m);
  for (Index i = 0; i < m; ++i)
    f_half(i) = soft_min(T.row(i).transpose() + h_half, prob.b, eps);

  const double shift = prob.a.dot(f_half);
  Potentials out;
  out.f = (f_half.array() - shift).matrix();
  out.h = (h_half.array() + shift).matrix();

  // Dual gradient in G at (f^{t+1}, G^t, h^{t+1}); the row factor
  // exp(f_i/eps + log Z_i) is 1 up to roundoff, kept for honesty.
  Mat d_g(m, prob.dx());
  double row_err = 0.0;
  for (Index i = 0; i < m; ++i) {
    Vec xw;
    double log_row;
    if (cfg.naive_exp) {
      Vec terms(n);
      for (Index j = 0; j < n; ++j)
        terms(j) = prob.b(j) * std::exp((T(i, j) + out.h(j)) / eps);
      const double z = pairwise_sum(terms);
      Vec scratch(n);
      xw = Vec(prob.dx());
      for (Index k = 0; k < prob.dx(); ++k) {
        for (Index j = 0; j < n; ++j) scratch(j) = terms(j) * prob.X(j, k);
        xw(k) = pairwise_sum(scratch) / z;
      }
      log_row = out.f(i) / eps + std::log(z);
    } else {
      const Vec e = (T.row(i).transpose() + out.h) / eps;
      const Tilt tilt = tilted_weights(e, prob.b);
      xw = Vec::Zero(prob.dx());
      Vec scratch(n);
      for (Index k = 0; k < prob.dx(); ++k) {
        for (Index j = 0; j < n; ++j) scratch(j) = tilt.p(j) * prob.X(j, k);
        xw(k) = pairwise_sum(scratch);
      }
      log_row = out.f(i) / eps + tilt.log_z;
    }
    const double row_factor = std::exp(log_row);
    row_err = std::max(row_err, std::abs(row_factor - 1.0));
    d_g.row(i) = row_factor * xw.transpose();
  }

  const ProjectionResult proj =
      project_variant(p.G - eta * d_g, prob.a, pcfg);
  out.G = proj.G;

  if (diag) {
    diag->row_marginal_err = row_err;
    diag->d_g = std::move(d_g);
    diag->projection = proj;
  }
  return out;
}

SolveResult run_modified(const DiscreteProblem& prob, const SolverConfig& cfg,
                         const ProjectionConfig& pcfg, const Potentials& init) {
  const double eta = cfg.eta ? *cfg.eta : prob.epsilon;
  SolverConfig c = cfg;
  c.eta = eta;

  const double D0 = dual_objective(init, prob);
  ProblemBounds bounds =
      problem_bounds(prob, pcfg.radius, eta, D0, detail::sup_abs(init.h),
                     detail::sup_abs(init.f));

  SolveResult out;
  out.trace.header.m = prob.m();
  out.trace.header.n = prob.n();
  out.trace.header.d_x = prob.dx();
  out.trace.header.d_y = prob.dy();
  out.trace.header.epsilon = prob.epsilon;
  out.trace.header.mode = "modified";
  out.trace.header.eta = eta;
  out.trace.header.radius = pcfg.radius;
  out.trace.header.projection =
      pcfg.variant == ProjectionVariant::joint_ball ? "ball" : "box";
  out.trace.header.eta_guard_ok = eta <= 0.0 || eta < bounds.eta_guard;
  out.trace.header.bounds = bounds;

  Potentials p = init;
  out.trace.rows.push_back(detail::trace_row(0, p, prob, cfg.ref_dual, nullptr));
  double D_prev = out.trace.rows.back().dual;

  for (int t = 1; t <= cfg.max_iters; ++t) {
    const Mat G_prev = p.G;
    p = modified_step(p, prob, c, pcfg);
    const TraceRow row = detail::trace_row(t, p, prob, cfg.ref_dual, &G_prev);
    const double dD = row.dual - D_prev;
    D_prev = row.dual;
    out.trace.rows.push_back(row);
    out.iterations = t;
    if (detail::stop_now(row, dD, cfg.tol, prob.epsilon)) {
      out.converged = true;
      break;
    }
  }
  out.potentials = std::move(p);
  return out;
}

SolveResult run_modified(const DiscreteProblem& prob, const SolverConfig& cfg) {
  SolverConfig c = cfg;
  c.mode = SolverMode::modified;
  const ResolvedSettings rs = resolve_settings(prob, c);
  c.eta = rs.eta;
  ProjectionConfig pcfg;
  pcfg.radius = rs.radius;
  return run_modified(prob, c, pcfg, zero_potentials(prob));
}

}  // namespace evqr
