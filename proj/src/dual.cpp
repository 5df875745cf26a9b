#include "evqr/dual.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "evqr/logsumexp.hpp"

namespace evqr {

namespace {

void check_shapes(const Potentials& p, const DiscreteProblem& prob) {
  if (p.f.size() != prob.m() || p.h.size() != prob.n() ||
      p.G.rows() != prob.m() || p.G.cols() != prob.dx())
    throw std::invalid_argument("potentials do not match problem dimensions");
  if (!p.f.allFinite() || !p.G.allFinite() || !p.h.allFinite())
    throw std::invalid_argument("non-finite potentials");
}

// (f_i + <G_i, x_j> + h_j - C_ij) / eps
Mat full_exponents(const Potentials& p, const DiscreteProblem& prob) {
  Mat E = ((p.G * prob.X.transpose()) - prob.C) / prob.epsilon;
  E.colwise() += p.f / prob.epsilon;
  E.rowwise() += (p.h / prob.epsilon).transpose();
  return E;
}

}  // namespace

Potentials zero_potentials(const DiscreteProblem& prob) {
  Potentials p;
  p.f = Vec::Zero(prob.m());
  p.G = Mat::Zero(prob.m(), prob.dx());
  p.h = Vec::Zero(prob.n());
  return p;
}

Potentials normalized(const Potentials& p, const DiscreteProblem& prob) {
  check_shapes(p, prob);
  const double mean_f = prob.a.dot(p.f);
  const Vec mean_g = p.G.transpose() * prob.a;
  Potentials out;
  out.f = p.f.array() - mean_f;
  out.G = p.G.rowwise() - mean_g.transpose();
  out.h = p.h + Vec::Constant(prob.n(), mean_f) + prob.X * mean_g;
  return out;
}

double normalization_residual(const Potentials& p, const Vec& a) {
  const double mean_f = std::abs(a.dot(p.f));
  const double mean_g = (p.G.transpose() * a).norm();
  return std::max(mean_f, mean_g);
}

double iota(const Potentials& p, const DiscreteProblem& prob) {
  check_shapes(p, prob);
  const Mat E = full_exponents(p, prob);
  const Index m = prob.m(), n = prob.n();
  double mx = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < m; ++i) {
    if (!(prob.a[i] > 0.0)) continue;
    for (Index j = 0; j < n; ++j)
      if (prob.b[j] > 0.0 && E(i, j) > mx) mx = E(i, j);
  }
  if (!(mx > -std::numeric_limits<double>::infinity())) return 0.0;
  Vec row_sums(m), terms(n);
  for (Index i = 0; i < m; ++i) {
    if (!(prob.a[i] > 0.0)) {
      row_sums[i] = 0.0;
      continue;
    }
    for (Index j = 0; j < n; ++j)
      terms[j] =
          prob.b[j] > 0.0 ? prob.b[j] * std::exp(E(i, j) - mx) : 0.0;
    row_sums[i] = prob.a[i] * pairwise_sum(terms);
  }
  return std::exp(mx + std::log(pairwise_sum(row_sums)));
}

double dual_objective(const Potentials& p, const DiscreteProblem& prob) {
  return prob.a.dot(p.f) + prob.b.dot(p.h) -
         prob.epsilon * (iota(p, prob) - 1.0);
}

NegGradients neg_gradients(const Potentials& p, const DiscreteProblem& prob) {
  check_shapes(p, prob);
  const double eps = prob.epsilon;
  const Index m = prob.m(), n = prob.n(), dx = prob.dx();
  const Mat T = p.G * prob.X.transpose();

  NegGradients out;
  out.f.resize(m);
  out.g.resize(m, dx);
  out.h.resize(n);

  Vec e(n), scaled(n);
  for (Index i = 0; i < m; ++i) {
    e = (T.row(i).transpose() - prob.C.row(i).transpose() + p.h) / eps;
    const Tilt tilt = tilted_weights(e, prob.b);
    const double r = p.f[i] / eps + tilt.log_z;  // log of the row marginal ratio
    out.f[i] = std::expm1(r);
    const double scale = std::exp(r);
    for (Index k = 0; k < dx; ++k) {
      scaled = tilt.p.cwiseProduct(prob.X.col(k));
      out.g(i, k) = scale * pairwise_sum(scaled);
    }
  }

  Vec ec(m);
  for (Index j = 0; j < n; ++j) {
    ec = (p.f + T.col(j) - prob.C.col(j)) / eps;
    const Tilt tilt = tilted_weights(ec, prob.a);
    out.h[j] = std::expm1(p.h[j] / eps + tilt.log_z);
  }
  return out;
}

Coupling coupling(const Potentials& p, const DiscreteProblem& prob) {
  check_shapes(p, prob);
  const Mat E = full_exponents(p, prob);
  Coupling cpl;
  cpl.pi.resize(prob.m(), prob.n());
  for (Index i = 0; i < prob.m(); ++i)
    for (Index j = 0; j < prob.n(); ++j)
      cpl.pi(i, j) = prob.a[i] * prob.b[j] * std::exp(E(i, j));
  return cpl;
}

Residuals residuals(const Coupling& cpl, const DiscreteProblem& prob) {
  if (cpl.pi.rows() != prob.m() || cpl.pi.cols() != prob.n())
    throw std::invalid_argument("coupling does not match problem dimensions");
  const Index m = prob.m(), n = prob.n(), dx = prob.dx();
  Residuals res{0.0, 0.0, 0.0};
  Vec col_sums = Vec::Zero(n);
  Vec row_terms(n), coord(n);
  for (Index i = 0; i < m; ++i) {
    row_terms = cpl.pi.row(i).transpose();
    res.row += std::abs(pairwise_sum(row_terms) - prob.a[i]);
    col_sums += row_terms;
    // Conditional-mean violation, skipping numerically empty atoms.
    if (prob.a[i] >= 1e-15) {
      double norm_sq = 0.0;
      for (Index k = 0; k < dx; ++k) {
        coord = row_terms.cwiseProduct(prob.X.col(k));
        const double s = pairwise_sum(coord);
        norm_sq += s * s;
      }
      res.mi = std::max(res.mi, std::sqrt(norm_sq) / prob.a[i]);
    }
  }
  for (Index j = 0; j < n; ++j) res.col += std::abs(col_sums[j] - prob.b[j]);
  return res;
}

double primal_objective(const Coupling& cpl, const DiscreteProblem& prob) {
  if (cpl.pi.rows() != prob.m() || cpl.pi.cols() != prob.n())
    throw std::invalid_argument("coupling does not match problem dimensions");
  double cost = 0.0, kl = 0.0;
  for (Index i = 0; i < prob.m(); ++i) {
    for (Index j = 0; j < prob.n(); ++j) {
      const double pij = cpl.pi(i, j);
      if (pij < 0.0)
        throw std::invalid_argument("primal_objective: negative coupling entry");
      if (pij == 0.0) continue;  // 0 log 0 = 0
      const double ref = prob.a[i] * prob.b[j];
      if (ref == 0.0)
        throw std::invalid_argument(
            "primal_objective: coupling puts mass on a zero-weight cell");
      cost += pij * prob.C(i, j);
      kl += pij * std::log(pij / ref);
    }
  }
  return cost + prob.epsilon * kl;
}

double grad_norm_sq(const NegGradients& grads, const DiscreteProblem& prob) {
  double s = prob.a.dot(grads.f.cwiseAbs2());
  s += prob.a.dot(grads.g.rowwise().squaredNorm());
  s += prob.b.dot(grads.h.cwiseAbs2());
  return s;
}

double potentials_dist_sq(const Potentials& p, const Potentials& q,
                          const DiscreteProblem& prob) {
  double s = prob.a.dot((p.f - q.f).cwiseAbs2());
  s += prob.a.dot((p.G - q.G).rowwise().squaredNorm());
  s += prob.b.dot((p.h - q.h).cwiseAbs2());
  return s;
}

}  // namespace evqr
