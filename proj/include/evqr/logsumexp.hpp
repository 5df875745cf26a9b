#pragma once

#include "evqr/types.hpp"

namespace evqr {

// Sum with a fixed tree order: the result depends only on the element order,
// not on accumulation chunking, so repeated runs give identical bits.
double pairwise_sum(const double* x, Index n);
double pairwise_sum(const Vec& x);

// log(sum_j w_j exp(e_j)) via max shift over entries with w_j > 0.
// Returns -inf when every weight is zero.
double log_sum_exp_weighted(const Vec& exponents, const Vec& weights);

// Normalized tilt p_j = w_j exp(e_j) / sum_k w_k exp(e_k), plus the log of the
// normalizer. p sums to 1 exactly up to rounding; entries with w_j = 0 stay 0.
struct Tilt {
  Vec p;
  double log_z;
};
Tilt tilted_weights(const Vec& exponents, const Vec& weights);

}  // namespace evqr
