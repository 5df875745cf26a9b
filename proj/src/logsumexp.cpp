#include "evqr/logsumexp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace evqr {

double pairwise_sum(const double* x, Index n) {
  if (n <= 8) {
    double s = 0.0;
    for (Index i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const Index half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

double pairwise_sum(const Vec& x) { return pairwise_sum(x.data(), x.size()); }

double log_sum_exp_weighted(const Vec& exponents, const Vec& weights) {
  const Index n = exponents.size();
  if (weights.size() != n) throw std::invalid_argument("log_sum_exp_weighted: size mismatch");
  double mx = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j < n; ++j)
    if (weights[j] > 0.0 && exponents[j] > mx) mx = exponents[j];
  if (!(mx > -std::numeric_limits<double>::infinity())) return mx;  // all weights zero
  Vec terms(n);
  for (Index j = 0; j < n; ++j)
    terms[j] = weights[j] > 0.0 ? weights[j] * std::exp(exponents[j] - mx) : 0.0;
  return mx + std::log(pairwise_sum(terms));
}

Tilt tilted_weights(const Vec& exponents, const Vec& weights) {
  const Index n = exponents.size();
  if (weights.size() != n) throw std::invalid_argument("tilted_weights: size mismatch");
  double mx = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j < n; ++j)
    if (weights[j] > 0.0 && exponents[j] > mx) mx = exponents[j];
  Tilt out;
  out.p = Vec::Zero(n);
  if (!(mx > -std::numeric_limits<double>::infinity())) {
    out.log_z = mx;
    return out;
  }
  for (Index j = 0; j < n; ++j)
    if (weights[j] > 0.0) out.p[j] = weights[j] * std::exp(exponents[j] - mx);
  const double z = pairwise_sum(out.p);
  out.p /= z;
  out.log_z = mx + std::log(z);
  return out;
}

}  // namespace evqr
