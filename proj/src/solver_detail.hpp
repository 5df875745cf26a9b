#pragma once

#include <cmath>
#include <optional>

#include "evqr/solver.hpp"

namespace evqr::detail {

inline double sup_abs(const Vec& v) {
  return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

inline double max_row_norm(const Mat& G) {
  double s = 0.0;
  for (Index i = 0; i < G.rows(); ++i) s = std::max(s, G.row(i).norm());
  return s;
}

inline double g_displacement(const Mat& G, const Mat& G_prev, const Vec& a) {
  double s = 0.0;
  for (Index i = 0; i < G.rows(); ++i)
    s += a(i) * (G.row(i) - G_prev.row(i)).squaredNorm();
  return std::sqrt(s);
}

inline TraceRow trace_row(int t, const Potentials& p,
                          const DiscreteProblem& prob,
                          const std::optional<double>& ref_dual,
                          const Mat* G_prev) {
  TraceRow r;
  r.t = t;
  r.dual = dual_objective(p, prob);
  if (ref_dual) r.gap = *ref_dual - r.dual;
  const Residuals res = residuals(coupling(p, prob), prob);
  r.row_res = res.row;
  r.col_res = res.col;
  r.mi_res = res.mi;
  r.f_sup = sup_abs(p.f);
  r.g_sup = max_row_norm(p.G);
  r.h_sup = sup_abs(p.h);
  if (G_prev) r.g_displacement = g_displacement(p.G, *G_prev, prob.a);
  return r;
}

inline bool stop_now(const TraceRow& row, double dual_increase, double tol,
                     double eps) {
  return row.row_res <= tol && row.col_res <= tol && row.mi_res <= tol &&
         dual_increase <= tol * eps;
}

}  // namespace evqr::detail
