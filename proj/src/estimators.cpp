#include "evqr/estimators.hpp"

#include <cmath>

#include "evqr/logsumexp.hpp"

namespace evqr {

ConditionalMoments conditional_moments(const Potentials& p,
                                       const DiscreteProblem& prob, Index i) {
  const Index n = prob.n(), dx = prob.dx(), dy = prob.dy();
  const double eps = prob.epsilon;

  Vec e(n);
  for (Index j = 0; j < n; ++j)
    e(j) = (p.f(i) + p.G.row(i).dot(prob.X.row(j)) + p.h(j) - prob.C(i, j)) /
           eps;
  const Tilt tilt = tilted_weights(e, prob.b);
  const Vec& w = tilt.p;

  ConditionalMoments out;
  Vec scratch(n);
  out.mean_y = Vec(dy);
  for (Index k = 0; k < dy; ++k) {
    for (Index j = 0; j < n; ++j) scratch(j) = w(j) * prob.Y(j, k);
    out.mean_y(k) = pairwise_sum(scratch);
  }
  out.xx = Mat(dx, dx);
  for (Index k = 0; k < dx; ++k)
    for (Index l = k; l < dx; ++l) {
      for (Index j = 0; j < n; ++j)
        scratch(j) = w(j) * prob.X(j, k) * prob.X(j, l);
      out.xx(k, l) = out.xx(l, k) = pairwise_sum(scratch);
    }
  out.xy = Mat(dx, dy);
  for (Index k = 0; k < dx; ++k)
    for (Index l = 0; l < dy; ++l) {
      for (Index j = 0; j < n; ++j)
        scratch(j) = w(j) * prob.X(j, k) * prob.Y(j, l);
      out.xy(k, l) = pairwise_sum(scratch);
    }
  return out;
}

BEstimates b_estimators(const Potentials& p, const DiscreteProblem& prob,
                        double lambda_tol_rel) {
  const Index m = prob.m(), dx = prob.dx(), dy = prob.dy();
  BEstimates out;
  out.B0 = Mat(m, dy);
  out.B1.resize(static_cast<std::size_t>(m));
  out.degenerate.assign(static_cast<std::size_t>(m), false);

  for (Index i = 0; i < m; ++i) {
    const ConditionalMoments mom = conditional_moments(p, prob, i);
    out.B0.row(i) = mom.mean_y.transpose();
    Eigen::SelfAdjointEigenSolver<Mat> es(mom.xx);
    const double floor = lambda_tol_rel * mom.xx.trace();
    if (es.eigenvalues().minCoeff() <= floor) {
      out.degenerate[static_cast<std::size_t>(i)] = true;
      out.B1[static_cast<std::size_t>(i)] = Mat::Zero(dx, dy);
    } else {
      Mat scaled = es.eigenvectors().transpose() * mom.xy;
      for (Index k = 0; k < dx; ++k) scaled.row(k) /= es.eigenvalues()(k);
      out.B1[static_cast<std::size_t>(i)] = es.eigenvectors() * scaled;
    }
  }
  return out;
}

double b1_distance(const BEstimates& lhs, const BEstimates& rhs, const Vec& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < lhs.B1.size(); ++i)
    s += a(static_cast<Index>(i)) * (lhs.B1[i] - rhs.B1[i]).squaredNorm();
  return std::sqrt(s);
}

}  // namespace evqr
