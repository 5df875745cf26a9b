#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evqr/bounds.hpp"
#include "evqr/dual.hpp"
#include "evqr/newton.hpp"
#include "evqr/projection.hpp"

namespace evqr {

enum class SolverMode { vanilla, modified };

struct SolverConfig {
  double epsilon = 1.0;                // mirrors DiscreteProblem.epsilon
  std::optional<double> eta{};         // empty = auto (eta = eps, flagged)
  std::optional<double> radius{};      // empty = auto (optimal g-bound)
  int max_iters = 1000;
  double tol = 1e-8;
  SolverMode mode = SolverMode::vanilla;
  bool naive_exp = false;  // literal exponentials instead of log-domain
  std::optional<double> ref_dual{};  // reference dual value for trace gaps
};

// Practical step size capped by the theoretical guard:
// value = min(eps, 0.9 eps / (M_x^2 e^{2 radius M_x / eps})). The flag says
// whether the plain eta = eps choice violates the guard (it always does once
// M_x >= 1).
struct EtaChoice {
  double value = 0.0;
  bool eps_violates_guard = false;
};
EtaChoice default_eta(const DiscreteProblem& prob, double radius);

// Auto settings resolved against a concrete problem.
struct ResolvedSettings {
  double eta = 0.0;      // 0 for vanilla mode
  double radius = 0.0;
  bool eta_guard_ok = false;  // eta < eps / (M_x^2 e^{2 radius M_x/eps})
};
ResolvedSettings resolve_settings(const DiscreteProblem& prob,
                                  const SolverConfig& cfg);

struct TraceRow {
  int t = 0;
  double dual = 0.0;
  std::optional<double> gap{};
  double row_res = 0.0;
  double col_res = 0.0;
  double mi_res = 0.0;
  double f_sup = 0.0;
  double g_sup = 0.0;  // max_i ||G_i||
  double h_sup = 0.0;
  std::optional<double> g_displacement{};  // ||G^{t} - G^{t-1}||_{L2(a)}
};

struct TraceHeader {
  Index m = 0, n = 0, d_x = 0, d_y = 0;
  double epsilon = 1.0;
  std::string mode;                 // "vanilla" | "modified"
  std::optional<double> eta{};      // modified only
  std::optional<double> radius{};   // modified only
  std::string projection;           // "ball" | "box" | ""
  bool eta_guard_ok = true;         // vacuously true for vanilla
  std::uint64_t seed = 0;           // reference/sampling seed, 0 if none
  std::string generator;            // RNG identity, "" when no sampling
  ProblemBounds bounds;
};

struct IterateTrace {
  TraceHeader header;
  std::vector<TraceRow> rows;
};

// Extra observables of a single step, for tests and estimator plumbing.
struct StepDiagnostics {
  double iota_mid = 1.0;          // vanilla: iota after the f-update
  double row_marginal_err = 0.0;  // modified: max_i |row sum / a_i - 1|
  Mat d_g;                        // modified: dual gradient direction in G
  ProjectionResult projection;    // modified: projection outcome
};

// One exact-solve sweep: per-row implicit g-solve (warm-started at the input
// rows), closed-form f and h updates, affine normalization. Output is
// normalized; the dual never decreases.
Potentials vanilla_step(const Potentials& p, const DiscreteProblem& prob,
                        const NewtonConfig& ncfg,
                        StepDiagnostics* diag = nullptr);

// One projected-gradient sweep: h then f closed-form updates, normalization
// of f (compensated in h), one projected gradient step in G. The coupling
// built from (f_out, G_in, h_out) has row sums exactly a.
Potentials modified_step(const Potentials& p, const DiscreteProblem& prob,
                         const SolverConfig& cfg, const ProjectionConfig& pcfg,
                         StepDiagnostics* diag = nullptr);

struct SolveResult {
  Potentials potentials;
  IterateTrace trace;
  bool converged = false;
  int iterations = 0;
};

// Iterates the respective step until max_iters, or until all three coupling
// residuals are <= cfg.tol and the dual increase is <= cfg.tol * eps.
SolveResult run_vanilla(const DiscreteProblem& prob, const SolverConfig& cfg,
                        const NewtonConfig& ncfg, const Potentials& init);
SolveResult run_vanilla(const DiscreteProblem& prob, const SolverConfig& cfg,
                        const NewtonConfig& ncfg = {});

SolveResult run_modified(const DiscreteProblem& prob, const SolverConfig& cfg,
                         const ProjectionConfig& pcfg, const Potentials& init);
SolveResult run_modified(const DiscreteProblem& prob, const SolverConfig& cfg);

}  // namespace evqr
