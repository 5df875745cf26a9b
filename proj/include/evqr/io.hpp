#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evqr/estimators.hpp"
#include "evqr/gaussian.hpp"
#include "evqr/solver.hpp"

namespace evqr {

// Comma-separated, header row required, '.' decimal. All referenced cells
// must be numeric.
struct CsvTable {
  std::vector<std::string> columns;
  Mat data;  // rows x columns, parsed as doubles
};
CsvTable read_csv(const std::string& path);

// Extracts the named columns; X is centered to weighted mean zero under the
// uniform weights b = 1/n. Throws std::invalid_argument naming the missing
// column or the offending cell (row and column) and when fewer than 2 rows.
struct IngestResult {
  Mat X;
  Mat Y;
};
IngestResult ingest_csv(const std::string& path,
                        const std::vector<std::string>& x_cols,
                        const std::vector<std::string>& y_cols);

// Reference measure atoms with uniform weights. kind is "uniform-cube",
// "standard-gaussian", or a CSV path whose numeric columns are the atoms
// (d_y must match the file width; m is taken from the file).
struct Reference {
  Mat U;
  Vec a;
};
Reference make_reference(const std::string& kind, Index m, Index d_y,
                         std::uint64_t seed);

// Deterministic JSON: fixed key order, shortest-round-trip doubles, so equal
// inputs produce byte-identical documents.
std::string trace_to_json(const IterateTrace& trace);
IterateTrace trace_from_json(const std::string& text);

std::string estimates_to_json(const BEstimates& est);

std::string bounds_to_json(const ProblemBounds& bounds);

GaussianModel gaussian_model_from_json(const std::string& text);
GaussianModel gaussian_model_from_file(const std::string& path);

}  // namespace evqr
