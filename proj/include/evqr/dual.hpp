#pragma once

#include "evqr/problem.hpp"

namespace evqr {

// Dual triple (f, G, h); row i of G is the vector potential at u_i.
// Normalized form: <a, f> = 0 and sum_i a_i G_i = 0 (h is unconstrained).
struct Potentials {
  Vec f;
  Mat G;
  Vec h;
};

Potentials zero_potentials(const DiscreteProblem& prob);

// Subtracts the a-weighted means from f and G and shifts h so the dual value
// is unchanged: h_j += <a,f> + <mean G, x_j>.
Potentials normalized(const Potentials& p, const DiscreteProblem& prob);

// max(|<a,f>|, ||sum_i a_i G_i||): zero for normalized potentials.
double normalization_residual(const Potentials& p, const Vec& a);

struct Coupling {
  Mat pi;  // pi_ij = a_i b_j exp((f_i + <G_i, x_j> + h_j - C_ij) / eps)
};

// Negative partial gradients of the dual in the weighted L2 geometry:
// dD/df_i = -a_i f[i], dD/dG_i = -a_i g.row(i), dD/dh_j = -b_j h[j].
struct NegGradients {
  Vec f;  // l_f,i = e^{f_i/eps} sum_j b_j e^{(<G_i,x_j>+h_j-C_ij)/eps} - 1
  Mat g;  // l_g,i = e^{f_i/eps} sum_j b_j x_j e^{...}
  Vec h;  // l_h,j = e^{h_j/eps} sum_i a_i e^{(f_i+<G_i,x_j>-C_ij)/eps} - 1
};

struct Residuals {
  double row;  // sum_i |row sum - a_i|
  double col;  // sum_j |col sum - b_j|
  double mi;   // max over rows with a_i > 0 of ||sum_j pi_ij x_j|| / a_i
};

// sum_ij a_i b_j exp((f_i + <G_i,x_j> + h_j - C_ij)/eps); max-shifted, exact
// value returned.
double iota(const Potentials& p, const DiscreteProblem& prob);

// D = <a,f> + <b,h> - eps (iota - 1).
double dual_objective(const Potentials& p, const DiscreteProblem& prob);

NegGradients neg_gradients(const Potentials& p, const DiscreteProblem& prob);

Coupling coupling(const Potentials& p, const DiscreteProblem& prob);

Residuals residuals(const Coupling& cpl, const DiscreteProblem& prob);

// sum_ij pi_ij C_ij + eps sum_ij pi_ij log(pi_ij / (a_i b_j)), 0 log 0 = 0.
// Throws if some pi_ij > 0 where a_i b_j = 0 (KL infinite: infeasible).
double primal_objective(const Coupling& cpl, const DiscreteProblem& prob);

// Squared H-norm sum_i a_i l_f,i^2 + sum_i a_i ||l_g,i||^2 + sum_j b_j l_h,j^2.
double grad_norm_sq(const NegGradients& grads, const DiscreteProblem& prob);

// Squared H-norm distance between two potential triples (uniqueness metric).
double potentials_dist_sq(const Potentials& p, const Potentials& q,
                          const DiscreteProblem& prob);

}  // namespace evqr
