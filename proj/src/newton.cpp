#include "evqr/newton.hpp"

#include <algorithm>
#include <cmath>

#include "evqr/logsumexp.hpp"

namespace evqr {

namespace {

struct TiltedMoments {
  Vec mean;      // tilted mean of x (the residual)
  Mat cov;       // tilted covariance of x
  double log_z;  // log of the normalizer
};

// Moments of x under p_j proportional to b_j exp((<g,x_j> + h_j - C_ij)/eps).
TiltedMoments row_moments(const Vec& g, Index row, const Vec& h,
                          const DiscreteProblem& prob) {
  const Index n = prob.n(), d = prob.dx();
  const Vec e =
      (prob.X * g + h - prob.C.row(row).transpose()) / prob.epsilon;
  const Tilt tilt = tilted_weights(e, prob.b);

  TiltedMoments out;
  out.log_z = tilt.log_z;
  out.mean.resize(d);
  Vec scratch(n);
  for (Index k = 0; k < d; ++k) {
    scratch = tilt.p.cwiseProduct(prob.X.col(k));
    out.mean[k] = pairwise_sum(scratch);
  }
  Mat xx(d, d);
  for (Index k = 0; k < d; ++k) {
    for (Index l = k; l < d; ++l) {
      scratch = tilt.p.cwiseProduct(prob.X.col(k)).cwiseProduct(prob.X.col(l));
      xx(k, l) = xx(l, k) = pairwise_sum(scratch);
    }
  }
  out.cov = xx - out.mean * out.mean.transpose();
  return out;
}

}  // namespace

Vec solve_g_implicit(Index row, const Vec& h, const DiscreteProblem& prob,
                     const Vec& init, const NewtonConfig& cfg) {
  if (row < 0 || row >= prob.m())
    throw std::invalid_argument("solve_g_implicit: row out of range");
  if (h.size() != prob.n() || init.size() != prob.dx())
    throw std::invalid_argument("solve_g_implicit: dimension mismatch");

  const Index d = prob.dx();
  Vec g = init;
  TiltedMoments mom = row_moments(g, row, h, prob);
  double res = mom.mean.norm();
  // Objective value (eps * log partition). In a saturated zone the tilted
  // weights form an exact point mass, the residual is locally constant, and
  // only the objective can certify progress.
  double phi = prob.epsilon * mom.log_z;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    if (res <= cfg.grad_tol) return g;

    Mat H = mom.cov / prob.epsilon;
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    // Absolute floor: a point-mass tilt collapses the covariance to exactly
    // zero, and a purely trace-relative ridge would leave H singular.
    const double ridge = cfg.ridge * std::max(H.trace(), 1.0);
    if (es.eigenvalues().minCoeff() < ridge) {
      H += ridge * Mat::Identity(d, d);
      es.compute(H);
    }
    const Vec dir = -es.eigenvectors() *
                    (es.eigenvalues().cwiseInverse().asDiagonal() *
                     (es.eigenvectors().transpose() * mom.mean));

    // Cap the trial step so the exponent field moves by at most ~30: past
    // that the tilted weights saturate to an exact point mass, the residual
    // becomes locally constant, and backtracking on it can never accept.
    double dmax = 0.0;
    for (Index j = 0; j < prob.X.rows(); ++j)
      dmax = std::max(dmax, std::abs(prob.X.row(j).dot(dir)) / prob.epsilon);
    double step = dmax > 30.0 ? 30.0 / dmax : 1.0;
    bool accepted = false;
    while (step >= 1e-14) {
      const Vec cand = g + step * dir;
      const TiltedMoments cand_mom = row_moments(cand, row, h, prob);
      const double cand_res = cand_mom.mean.norm();
      const double cand_phi = prob.epsilon * cand_mom.log_z;
      // isfinite also rejects NaN residuals from overflowed candidates,
      // which would otherwise read as vacuously converged. The residual
      // branch must not let the objective climb: accepting on either metric
      // alone admits a two-point cycle where each point beats the other on
      // one metric. The slack keeps the branch usable in the endgame, where
      // a genuine objective decrease rounds away in doubles.
      const double phi_slack = 1e-12 * (1.0 + std::abs(phi));
      if (std::isfinite(cand_res) && std::isfinite(cand_phi) &&
          cand.allFinite() &&
          (cand_phi < phi || (cand_res < res && cand_phi <= phi + phi_slack))) {
        g = cand;
        mom = cand_mom;
        res = cand_res;
        phi = cand_phi;
        accepted = true;
        break;
      }
      step *= cfg.backtrack;
    }
    if (!accepted) break;  // stalled below the smallest step
  }
  if (res <= cfg.grad_tol) return g;
  throw newton_error(row, res,
                     "solve_g_implicit: no convergence after max_iters, "
                     "residual " +
                         std::to_string(res));
}

}  // namespace evqr
