#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evqr/estimators.hpp"
#include "evqr/io.hpp"
#include "evqr/solver.hpp"

namespace {

using namespace evqr;

struct DataArgs {
  std::string input;
  std::vector<std::string> x_cols, y_cols;
  std::string reference = "standard-gaussian";
  long long m = 100;
  double epsilon = 1.0;
  std::uint64_t seed = 0;
};

void add_data_options(CLI::App* cmd, DataArgs& d) {
  cmd->add_option("--input", d.input, "CSV file with covariates and responses")
      ->required();
  cmd->add_option("--x-cols", d.x_cols, "covariate column names")
      ->required()
      ->delimiter(',');
  cmd->add_option("--y-cols", d.y_cols, "response column names")
      ->required()
      ->delimiter(',');
  cmd->add_option("--reference", d.reference,
                  "uniform-cube | standard-gaussian | CSV path of atoms");
  cmd->add_option("--m", d.m, "reference atom count (sampled references)");
  cmd->add_option("--epsilon", d.epsilon, "entropic regularization strength");
  cmd->add_option("--seed", d.seed, "reference sampling seed");
}

bool is_sampled_reference(const std::string& kind) {
  return kind == "uniform-cube" || kind == "standard-gaussian";
}

DiscreteProblem load_problem(const DataArgs& d) {
  const IngestResult data = ingest_csv(d.input, d.x_cols, d.y_cols);
  const Reference ref = make_reference(d.reference, static_cast<Index>(d.m),
                                       data.Y.cols(), d.seed);
  const Vec b = Vec::Constant(data.Y.rows(),
                              1.0 / static_cast<double>(data.Y.rows()));
  return make_problem(ref.U, ref.a, data.X, data.Y, b, d.epsilon);
}

std::optional<double> parse_auto(const std::string& text, const char* flag) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument(std::string(flag) +
                              ": expected 'auto' or a number, got '" + text +
                              "'");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << text;
}

int run_solve(const DataArgs& data, const std::string& eta_text,
              const std::string& radius_text, const std::string& mode_text,
              const std::string& projection_text, int max_iters, double tol,
              const std::string& trace_path, const std::string& est_path,
              std::optional<double> ref_dual, bool naive_exp) {
  const DiscreteProblem prob = load_problem(data);

  SolverConfig cfg;
  cfg.epsilon = prob.epsilon;
  cfg.eta = parse_auto(eta_text, "--eta");
  cfg.radius = parse_auto(radius_text, "--radius");
  cfg.max_iters = max_iters;
  cfg.tol = tol;
  cfg.mode =
      mode_text == "vanilla" ? SolverMode::vanilla : SolverMode::modified;
  cfg.naive_exp = naive_exp;
  cfg.ref_dual = ref_dual;

  SolveResult res;
  if (cfg.mode == SolverMode::vanilla) {
    res = run_vanilla(prob, cfg);
  } else {
    const ResolvedSettings rs = resolve_settings(prob, cfg);
    if (!cfg.eta && !rs.eta_guard_ok) {
      const EtaChoice guarded = default_eta(prob, rs.radius);
      std::fprintf(stderr,
                   "warning: --eta auto uses eta = epsilon = %.6g, above the "
                   "step-size guard %.6g; pass --eta %.6g for the guarded "
                   "value\n",
                   prob.epsilon, guarded.value / 0.9, guarded.value);
    }
    SolverConfig run_cfg = cfg;
    run_cfg.eta = rs.eta;
    ProjectionConfig pcfg;
    pcfg.radius = rs.radius;
    pcfg.variant = projection_text == "box" ? ProjectionVariant::coordinatewise_box
                                            : ProjectionVariant::joint_ball;
    res = run_modified(prob, run_cfg, pcfg, zero_potentials(prob));
  }

  if (is_sampled_reference(data.reference)) {
    res.trace.header.seed = data.seed;
    res.trace.header.generator = "mt19937_64 + Box-Muller";
  }

  if (!trace_path.empty()) write_file(trace_path, trace_to_json(res.trace));
  if (!est_path.empty())
    write_file(est_path,
               estimates_to_json(b_estimators(res.potentials, prob)));

  const TraceRow& last = res.trace.rows.back();
  std::printf(
      "mode=%s iters=%d converged=%s dual=%.12g row_res=%.3g col_res=%.3g "
      "mi_res=%.3g\n",
      mode_text.c_str(), res.iterations, res.converged ? "yes" : "no",
      last.dual, last.row_res, last.col_res, last.mi_res);
  return res.converged ? 0 : 2;
}

int run_bounds(const DataArgs& data, const std::string& eta_text,
               const std::string& radius_text) {
  const DiscreteProblem prob = load_problem(data);
  SolverConfig cfg;
  cfg.mode = SolverMode::modified;
  cfg.eta = parse_auto(eta_text, "--eta");
  cfg.radius = parse_auto(radius_text, "--radius");
  const ResolvedSettings rs = resolve_settings(prob, cfg);
  const double D0 = dual_objective(zero_potentials(prob), prob);
  const ProblemBounds bounds =
      problem_bounds(prob, rs.radius, rs.eta, D0, 0.0, 0.0);
  std::fputs(bounds_to_json(bounds).c_str(), stdout);
  return 0;
}

int run_gaussian_oracle(const std::string& params_path) {
  const GaussianModel model = gaussian_model_from_file(params_path);
  std::printf("{\"value\": %.17g}\n", gaussian_dual_value(model));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropic vector quantile regression solver"};
  app.require_subcommand(1);

  DataArgs data;
  std::string eta_text = "auto", radius_text = "auto";
  std::string mode_text = "vanilla", projection_text = "ball";
  int max_iters = 1000;
  double tol = 1e-8;
  std::string trace_path, est_path, params_path;
  double ref_dual_value = 0.0;
  bool naive_exp = false;

  CLI::App* solve = app.add_subcommand("solve", "solve a problem from CSV data");
  add_data_options(solve, data);
  solve->add_option("--eta", eta_text, "step size: auto or a value");
  solve->add_option("--radius", radius_text, "projection radius: auto or a value");
  solve->add_option("--mode", mode_text, "vanilla | modified")
      ->check(CLI::IsMember({"vanilla", "modified"}));
  solve->add_option("--projection", projection_text, "ball | box")
      ->check(CLI::IsMember({"ball", "box"}));
  solve->add_option("--max-iters", max_iters, "iteration cap");
  solve->add_option("--tol", tol, "residual and dual-increase tolerance");
  solve->add_option("--trace", trace_path, "write the iterate trace JSON here");
  solve->add_option("--estimators", est_path, "write B0/B1 estimates JSON here");
  CLI::Option* ref_dual_opt = solve->add_option(
      "--ref-dual", ref_dual_value, "reference dual value for trace gaps");
  solve->add_flag("--naive-exp", naive_exp,
                  "modified solver: literal exponentials, no max shift");

  CLI::App* bounds = app.add_subcommand("bounds", "print theory bounds as JSON");
  DataArgs bounds_data;
  std::string bounds_eta = "auto", bounds_radius = "auto";
  add_data_options(bounds, bounds_data);
  bounds->add_option("--eta", bounds_eta, "step size: auto or a value");
  bounds->add_option("--radius", bounds_radius, "projection radius: auto or a value");

  CLI::App* oracle =
      app.add_subcommand("gaussian-oracle", "closed-form Gaussian dual value");
  oracle->add_option("--params", params_path, "model JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) {
      std::optional<double> ref_dual;
      if (ref_dual_opt->count() > 0) ref_dual = ref_dual_value;
      return run_solve(data, eta_text, radius_text, mode_text, projection_text,
                       max_iters, tol, trace_path, est_path, ref_dual,
                       naive_exp);
    }
    if (bounds->parsed())
      return run_bounds(bounds_data, bounds_eta, bounds_radius);
    if (oracle->parsed()) return run_gaussian_oracle(params_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
