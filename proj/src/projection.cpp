#include "evqr/projection.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace evqr {

namespace {

// a-weighted Huber objective whose minimizer is the shift v.
double huber_objective(const Mat& G, const Vec& a, const Vec& v, double K) {
  double s = 0.0;
  for (Index i = 0; i < G.rows(); ++i)
    s += a[i] * huber(G.row(i).transpose() - v, K);
  return s;
}

void check_inputs(const Mat& G, const Vec& a, const ProjectionConfig& cfg) {
  if (G.rows() != a.size())
    throw std::invalid_argument("project: G rows and a length differ");
  if (!(cfg.radius > 0.0))
    throw std::invalid_argument("project: radius must be positive");
  if (!G.allFinite() || !a.allFinite())
    throw std::invalid_argument("project: non-finite input");
}

}  // namespace

double huber(const Vec& x, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("huber: delta must be positive");
  const double r = x.norm();
  if (r <= delta) return 0.5 * r * r;
  return delta * r - 0.5 * delta * delta;
}

ProjectionResult project(const Mat& G, const Vec& a,
                         const ProjectionConfig& cfg) {
  check_inputs(G, a, cfg);
  const Index m = G.rows(), d = G.cols();
  const double K = cfg.radius;

  ProjectionResult out;
  // Exact in the no-clipping regime, so the loop starts one step ahead.
  Vec v = G.transpose() * a;
  double phi = huber_objective(G, a, v, K);
  bool v_converged = false;

  Vec weights(m), v_next(d);
  for (int k = 0; k < cfg.max_iters; ++k) {
    double denom = 0.0;
    v_next.setZero();
    for (Index i = 0; i < m; ++i) {
      const double dist = (G.row(i).transpose() - v).norm();
      const double w = dist > 0.0 ? std::min(1.0, K / dist) : 1.0;
      denom += a[i] * w;
      v_next += a[i] * w * G.row(i).transpose();
    }
    v_next /= denom;
    const double phi_next = huber_objective(G, a, v_next, K);
    if (phi_next > phi + 1e-12 * (1.0 + std::abs(phi)))
      out.objective_monotone = false;
    phi = phi_next;
    const bool stop = (v_next - v).norm() <= cfg.tol * (1.0 + v.norm());
    v = v_next;
    out.iters = k + 1;
    if (stop) {
      v_converged = true;
      break;
    }
  }

  out.shift = v;
  out.G.resize(m, d);
  for (Index i = 0; i < m; ++i) {
    const Vec r = G.row(i).transpose() - v;
    const double dist = r.norm();
    const double w = dist > 0.0 ? std::min(1.0, K / dist) : 1.0;
    out.G.row(i) = (w * r).transpose();
  }
  out.mean_residual = (out.G.transpose() * a).norm();
  out.converged = v_converged && out.mean_residual <= cfg.post_tol;
  return out;
}

ProjectionResult project_coordinatewise(const Mat& G, const Vec& a,
                                        const ProjectionConfig& cfg) {
  check_inputs(G, a, cfg);
  const Index m = G.rows(), d = G.cols();
  const double K = cfg.radius;
  const auto clip = [K](double t) {
    return t > K ? K : (t < -K ? -K : t);
  };

  ProjectionResult out;
  out.G.resize(m, d);
  out.shift.resize(d);
  out.converged = true;
  out.mean_residual = 0.0;

  for (Index c = 0; c < d; ++c) {
    // a-weighted mean of the clipped column is continuous and nonincreasing
    // in the shift; the column range brackets its zero.
    const auto clipped_mean = [&](double v) {
      double s = 0.0;
      for (Index i = 0; i < m; ++i) s += a[i] * clip(G(i, c) - v);
      return s;
    };
    double lo = G.col(c).minCoeff(), hi = G.col(c).maxCoeff();
    assert(clipped_mean(lo) >= -1e-14 && clipped_mean(hi) <= 1e-14);
    int iters = 0;
    while (hi - lo > 1e-15 * (1.0 + std::max(std::abs(lo), std::abs(hi))) &&
           iters < 200) {
      const double mid = 0.5 * (lo + hi);
      (clipped_mean(mid) >= 0.0 ? lo : hi) = mid;
      ++iters;
    }
    const double v = 0.5 * (lo + hi);
    out.shift[c] = v;
    for (Index i = 0; i < m; ++i) out.G(i, c) = clip(G(i, c) - v);
    out.iters = std::max(out.iters, iters);
  }
  out.mean_residual = (out.G.transpose() * a).norm();
  out.converged = out.mean_residual <= cfg.post_tol;
  return out;
}

ProjectionResult project_variant(const Mat& G, const Vec& a,
                                 const ProjectionConfig& cfg) {
  return cfg.variant == ProjectionVariant::joint_ball
             ? project(G, a, cfg)
             : project_coordinatewise(G, a, cfg);
}

}  // namespace evqr
