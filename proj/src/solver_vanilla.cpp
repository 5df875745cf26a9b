#include <cmath>

#include "evqr/logsumexp.hpp"
#include "evqr/solver.hpp"
#include "solver_detail.hpp"

namespace evqr {

EtaChoice default_eta(const DiscreteProblem& prob, double radius) {
  double M = 1.0;
  for (Index j = 0; j < prob.n(); ++j)
    M = std::max(M, prob.X.row(j).norm());
  const double guard =
      prob.epsilon / (M * M * std::exp(2.0 * radius * M / prob.epsilon));
  EtaChoice c;
  c.value = std::min(prob.epsilon, 0.9 * guard);
  c.eps_violates_guard = !(prob.epsilon < guard);
  return c;
}

ResolvedSettings resolve_settings(const DiscreteProblem& prob,
                                  const SolverConfig& cfg) {
  ResolvedSettings rs;
  rs.radius =
      cfg.radius ? *cfg.radius : optimal_potential_bounds(prob)[1];
  if (cfg.mode == SolverMode::vanilla) {
    rs.eta = 0.0;
    rs.eta_guard_ok = true;
    return rs;
  }
  // Auto eta is the plain eps choice; the guard flag records whether it is
  // covered by the step-size theory. Use default_eta for a guarded value.
  rs.eta = cfg.eta ? *cfg.eta : prob.epsilon;
  double M = 1.0;
  for (Index j = 0; j < prob.n(); ++j)
    M = std::max(M, prob.X.row(j).norm());
  const double guard =
      prob.epsilon / (M * M * std::exp(2.0 * rs.radius * M / prob.epsilon));
  rs.eta_guard_ok = rs.eta <= 0.0 || rs.eta < guard;
  return rs;
}

Potentials vanilla_step(const Potentials& p, const DiscreteProblem& prob,
                        const NewtonConfig& ncfg, StepDiagnostics* diag) {
  const Index m = prob.m(), n = prob.n();
  const double eps = prob.epsilon;

  Mat Gt(m, prob.dx());
  for (Index i = 0; i < m; ++i)
    Gt.row(i) =
        solve_g_implicit(i, p.h, prob, p.G.row(i).transpose(), ncfg)
            .transpose();

  Vec ft(m);
  for (Index i = 0; i < m; ++i) {
    const Vec e =
        (prob.X * Gt.row(i).transpose() + p.h - prob.C.row(i).transpose()) /
        eps;
    ft(i) = -eps * log_sum_exp_weighted(e, prob.b);
  }

  if (diag) diag->iota_mid = iota({ft, Gt, p.h}, prob);

  Vec ht(n);
  for (Index j = 0; j < n; ++j) {
    const Vec e = (Gt * prob.X.row(j).transpose() + ft - prob.C.col(j)) / eps;
    ht(j) = -eps * log_sum_exp_weighted(e, prob.a);
  }

  return normalized({ft, Gt, ht}, prob);
}

SolveResult run_vanilla(const DiscreteProblem& prob, const SolverConfig& cfg,
                        const NewtonConfig& ncfg, const Potentials& init) {
  const double D0 = dual_objective(init, prob);
  const ResolvedSettings rs = resolve_settings(prob, cfg);

  SolveResult out;
  out.trace.header.m = prob.m();
  out.trace.header.n = prob.n();
  out.trace.header.d_x = prob.dx();
  out.trace.header.d_y = prob.dy();
  out.trace.header.epsilon = prob.epsilon;
  out.trace.header.mode = "vanilla";
  out.trace.header.eta_guard_ok = true;
  out.trace.header.bounds =
      problem_bounds(prob, rs.radius, 0.0, D0, detail::sup_abs(init.h),
                     detail::sup_abs(init.f));

  Potentials p = init;
  out.trace.rows.push_back(detail::trace_row(0, p, prob, cfg.ref_dual, nullptr));
  double D_prev = out.trace.rows.back().dual;

  for (int t = 1; t <= cfg.max_iters; ++t) {
    const Mat G_prev = p.G;
    p = vanilla_step(p, prob, ncfg);
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

SolveResult run_vanilla(const DiscreteProblem& prob, const SolverConfig& cfg,
                        const NewtonConfig& ncfg) {
  return run_vanilla(prob, cfg, ncfg, zero_potentials(prob));
}

}  // namespace evqr
