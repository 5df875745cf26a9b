#include "evqr/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "evqr/rng.hpp"

namespace evqr {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trimmed(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

// Full-cell parse; anything else (including empty) maps to NaN, which the
// consumers reject with the cell position.
double parse_cell(const std::string& cell) {
  double v = std::numeric_limits<double>::quiet_NaN();
  const char* first = cell.data();
  const char* last = first + cell.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    return std::numeric_limits<double>::quiet_NaN();
  return v;
}

Index find_column(const CsvTable& table, const std::string& name) {
  for (std::size_t k = 0; k < table.columns.size(); ++k)
    if (table.columns[k] == name) return static_cast<Index>(k);
  fail("csv: missing column '" + name + "'");
}

// row is the 0-based data row; reported 1-based, header excluded.
void require_finite(const CsvTable& table, Index row, Index col,
                    const std::string& name) {
  if (!std::isfinite(table.data(row, col)))
    fail("csv: non-numeric cell at row " + std::to_string(row + 1) +
         ", column '" + name + "'");
}

Vec json_to_vec(const ordered_json& j, const std::string& key) {
  if (!j.is_array()) fail("json: '" + key + "' must be an array");
  Vec v(static_cast<Index>(j.size()));
  Index k = 0;
  for (const auto& x : j) {
    if (!x.is_number()) fail("json: '" + key + "' must be numeric");
    v(k++) = x.get<double>();
  }
  return v;
}

Mat json_to_mat(const ordered_json& j, const std::string& key) {
  if (!j.is_array() || j.empty())
    fail("json: '" + key + "' must be a non-empty array of rows");
  const Index rows = static_cast<Index>(j.size());
  Index cols = -1;
  Mat out;
  Index r = 0;
  for (const auto& row : j) {
    const Vec v = json_to_vec(row, key);
    if (cols < 0) {
      cols = v.size();
      out = Mat(rows, cols);
    } else if (v.size() != cols) {
      fail("json: '" + key + "' has ragged rows");
    }
    out.row(r++) = v.transpose();
  }
  return out;
}

ordered_json vec_to_json(const Vec& v) {
  ordered_json j = ordered_json::array();
  for (Index k = 0; k < v.size(); ++k) j.push_back(v(k));
  return j;
}

ordered_json mat_to_json(const Mat& A) {
  ordered_json j = ordered_json::array();
  for (Index r = 0; r < A.rows(); ++r)
    j.push_back(vec_to_json(A.row(r).transpose()));
  return j;
}

ordered_json bounds_json(const ProblemBounds& b) {
  ordered_json j;
  j["M_x"] = b.M_x;
  j["M_x_raw"] = b.M_x_raw;
  j["c_inf"] = b.c_inf;
  j["L_c"] = b.L_c;
  j["diam_u"] = b.diam_u;
  j["lambda_min"] = b.lambda_min;
  j["sigma_inv_op"] = b.sigma_inv_op;
  j["epsilon"] = b.epsilon;
  j["K_bar_f"] = b.K_bar_f;
  j["K_bar_g"] = b.K_bar_g;
  j["K_bar_h"] = b.K_bar_h;
  j["D0"] = b.D0;
  j["h0_inf"] = b.h0_inf;
  j["f0_inf"] = b.f0_inf;
  j["K_f"] = b.K_f;
  j["K_g"] = b.K_g;
  j["K_h"] = b.K_h;
  j["K_bar"] = b.K_bar;
  j["radius"] = b.radius;
  j["K_hat_f"] = b.K_hat_f;
  j["K_hat_h"] = b.K_hat_h;
  j["K_bar_star"] = b.K_bar_star;
  j["eta"] = b.eta;
  j["tau"] = b.tau;
  j["tau_hat"] = b.tau_hat;
  j["tau_hat_guard_ok"] = b.tau_hat_guard_ok;
  j["eta_guard"] = b.eta_guard;
  return j;
}

ProblemBounds bounds_from_json(const ordered_json& j) {
  ProblemBounds b;
  b.M_x = j.at("M_x").get<double>();
  b.M_x_raw = j.at("M_x_raw").get<double>();
  b.c_inf = j.at("c_inf").get<double>();
  b.L_c = j.at("L_c").get<double>();
  b.diam_u = j.at("diam_u").get<double>();
  b.lambda_min = j.at("lambda_min").get<double>();
  b.sigma_inv_op = j.at("sigma_inv_op").get<double>();
  b.epsilon = j.at("epsilon").get<double>();
  b.K_bar_f = j.at("K_bar_f").get<double>();
  b.K_bar_g = j.at("K_bar_g").get<double>();
  b.K_bar_h = j.at("K_bar_h").get<double>();
  b.D0 = j.at("D0").get<double>();
  b.h0_inf = j.at("h0_inf").get<double>();
  b.f0_inf = j.at("f0_inf").get<double>();
  b.K_f = j.at("K_f").get<double>();
  b.K_g = j.at("K_g").get<double>();
  b.K_h = j.at("K_h").get<double>();
  b.K_bar = j.at("K_bar").get<double>();
  b.radius = j.at("radius").get<double>();
  b.K_hat_f = j.at("K_hat_f").get<double>();
  b.K_hat_h = j.at("K_hat_h").get<double>();
  b.K_bar_star = j.at("K_bar_star").get<double>();
  b.eta = j.at("eta").get<double>();
  b.tau = j.at("tau").get<double>();
  b.tau_hat = j.at("tau_hat").get<double>();
  b.tau_hat_guard_ok = j.at("tau_hat_guard_ok").get<bool>();
  b.eta_guard = j.at("eta_guard").get<double>();
  return b;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) fail("csv: '" + path + "' is empty");
  CsvTable table;
  table.columns = split_line(line);
  if (table.columns.empty()) fail("csv: '" + path + "' has no header");

  std::vector<double> cells;
  Index rows = 0;
  const Index width = static_cast<Index>(table.columns.size());
  while (std::getline(in, line)) {
    if (trimmed(line).empty()) continue;
    const auto parts = split_line(line);
    if (static_cast<Index>(parts.size()) != width)
      fail("csv: row " + std::to_string(rows + 1) + " has " +
           std::to_string(parts.size()) + " cells, expected " +
           std::to_string(width));
    for (const auto& cell : parts) cells.push_back(parse_cell(cell));
    ++rows;
  }
  table.data = Mat(rows, width);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < width; ++c)
      table.data(r, c) = cells[static_cast<std::size_t>(r * width + c)];
  return table;
}

IngestResult ingest_csv(const std::string& path,
                        const std::vector<std::string>& x_cols,
                        const std::vector<std::string>& y_cols) {
  if (x_cols.empty() || y_cols.empty())
    fail("csv: need at least one X and one Y column");
  const CsvTable table = read_csv(path);
  const Index n = table.data.rows();
  if (n < 2) fail("csv: need at least 2 data rows, got " + std::to_string(n));

  IngestResult out;
  out.X = Mat(n, static_cast<Index>(x_cols.size()));
  out.Y = Mat(n, static_cast<Index>(y_cols.size()));
  for (std::size_t k = 0; k < x_cols.size(); ++k) {
    const Index c = find_column(table, x_cols[k]);
    for (Index r = 0; r < n; ++r) {
      require_finite(table, r, c, x_cols[k]);
      out.X(r, static_cast<Index>(k)) = table.data(r, c);
    }
  }
  for (std::size_t k = 0; k < y_cols.size(); ++k) {
    const Index c = find_column(table, y_cols[k]);
    for (Index r = 0; r < n; ++r) {
      require_finite(table, r, c, y_cols[k]);
      out.Y(r, static_cast<Index>(k)) = table.data(r, c);
    }
  }
  const Vec mean = out.X.colwise().mean().transpose();
  out.X.rowwise() -= mean.transpose();
  return out;
}

Reference make_reference(const std::string& kind, Index m, Index d_y,
                         std::uint64_t seed) {
  Reference ref;
  if (kind == "uniform-cube" || kind == "standard-gaussian") {
    if (m < 1) fail("reference: need m >= 1");
    if (d_y < 1) fail("reference: need d_y >= 1");
    Rng rng(seed);
    ref.U = Mat(m, d_y);
    for (Index i = 0; i < m; ++i)
      for (Index k = 0; k < d_y; ++k)
        ref.U(i, k) = kind == "uniform-cube" ? rng.uniform() : rng.normal();
  } else {
    const CsvTable table = read_csv(kind);
    if (table.data.rows() < 1) fail("reference: '" + kind + "' has no rows");
    if (d_y > 0 && table.data.cols() != d_y)
      fail("reference: '" + kind + "' has " +
           std::to_string(table.data.cols()) + " columns, expected " +
           std::to_string(d_y));
    for (Index r = 0; r < table.data.rows(); ++r)
      for (Index c = 0; c < table.data.cols(); ++c)
        require_finite(table, r, c, table.columns[static_cast<std::size_t>(c)]);
    ref.U = table.data;
  }
  ref.a = Vec::Constant(ref.U.rows(), 1.0 / static_cast<double>(ref.U.rows()));
  return ref;
}

std::string trace_to_json(const IterateTrace& trace) {
  ordered_json j;
  ordered_json& h = j["header"];
  h["m"] = trace.header.m;
  h["n"] = trace.header.n;
  h["d_x"] = trace.header.d_x;
  h["d_y"] = trace.header.d_y;
  h["epsilon"] = trace.header.epsilon;
  h["mode"] = trace.header.mode;
  if (trace.header.eta)
    h["eta"] = *trace.header.eta;
  else
    h["eta"] = nullptr;
  if (trace.header.radius)
    h["radius"] = *trace.header.radius;
  else
    h["radius"] = nullptr;
  if (trace.header.projection.empty())
    h["projection"] = nullptr;
  else
    h["projection"] = trace.header.projection;
  h["eta_guard_ok"] = trace.header.eta_guard_ok;
  h["seed"] = trace.header.seed;
  h["generator"] = trace.header.generator;
  h["bounds"] = bounds_json(trace.header.bounds);

  ordered_json rows = ordered_json::array();
  for (const TraceRow& r : trace.rows) {
    ordered_json row;
    row["t"] = r.t;
    row["dual"] = r.dual;
    if (r.gap)
      row["gap"] = *r.gap;
    else
      row["gap"] = nullptr;
    row["row_res"] = r.row_res;
    row["col_res"] = r.col_res;
    row["mi_res"] = r.mi_res;
    row["f_sup"] = r.f_sup;
    row["g_sup"] = r.g_sup;
    row["h_sup"] = r.h_sup;
    if (r.g_displacement)
      row["g_displacement"] = *r.g_displacement;
    else
      row["g_displacement"] = nullptr;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

IterateTrace trace_from_json(const std::string& text) {
  const ordered_json j = ordered_json::parse(text);
  IterateTrace trace;
  const ordered_json& h = j.at("header");
  trace.header.m = h.at("m").get<Index>();
  trace.header.n = h.at("n").get<Index>();
  trace.header.d_x = h.at("d_x").get<Index>();
  trace.header.d_y = h.at("d_y").get<Index>();
  trace.header.epsilon = h.at("epsilon").get<double>();
  trace.header.mode = h.at("mode").get<std::string>();
  if (!h.at("eta").is_null()) trace.header.eta = h.at("eta").get<double>();
  if (!h.at("radius").is_null())
    trace.header.radius = h.at("radius").get<double>();
  if (!h.at("projection").is_null())
    trace.header.projection = h.at("projection").get<std::string>();
  trace.header.eta_guard_ok = h.at("eta_guard_ok").get<bool>();
  trace.header.seed = h.at("seed").get<std::uint64_t>();
  trace.header.generator = h.at("generator").get<std::string>();
  trace.header.bounds = bounds_from_json(h.at("bounds"));

  for (const auto& rj : j.at("rows")) {
    TraceRow r;
    r.t = rj.at("t").get<int>();
    r.dual = rj.at("dual").get<double>();
    if (!rj.at("gap").is_null()) r.gap = rj.at("gap").get<double>();
    r.row_res = rj.at("row_res").get<double>();
    r.col_res = rj.at("col_res").get<double>();
    r.mi_res = rj.at("mi_res").get<double>();
    r.f_sup = rj.at("f_sup").get<double>();
    r.g_sup = rj.at("g_sup").get<double>();
    r.h_sup = rj.at("h_sup").get<double>();
    if (!rj.at("g_displacement").is_null())
      r.g_displacement = rj.at("g_displacement").get<double>();
    trace.rows.push_back(r);
  }
  return trace;
}

std::string estimates_to_json(const BEstimates& est) {
  ordered_json j;
  j["B0"] = mat_to_json(est.B0);
  ordered_json b1 = ordered_json::array();
  for (const Mat& B : est.B1) b1.push_back(mat_to_json(B));
  j["B1"] = std::move(b1);
  ordered_json deg = ordered_json::array();
  for (const bool d : est.degenerate) deg.push_back(d);
  j["degenerate"] = std::move(deg);
  return j.dump(2) + "\n";
}

std::string bounds_to_json(const ProblemBounds& bounds) {
  return bounds_json(bounds).dump(2) + "\n";
}

GaussianModel gaussian_model_from_json(const std::string& text) {
  const ordered_json j = ordered_json::parse(text);
  GaussianModel model;
  model.m_Y = json_to_vec(j.at("m_Y"), "m_Y");
  model.Sigma_XX = json_to_mat(j.at("Sigma_XX"), "Sigma_XX");
  model.Sigma_XY = json_to_mat(j.at("Sigma_XY"), "Sigma_XY");
  model.Sigma_YY = json_to_mat(j.at("Sigma_YY"), "Sigma_YY");
  model.epsilon = j.at("epsilon").get<double>();
  validate(model);
  return model;
}

GaussianModel gaussian_model_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("json: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return gaussian_model_from_json(ss.str());
}

}  // namespace evqr
