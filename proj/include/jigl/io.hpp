#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jigl/core.hpp"

namespace jigl {

struct CsvData {
  TimeSeriesMatrix values;
  Mask mask;  // zero where the file had an empty cell or a NaN literal
};

// Rectangular numeric CSV, rows = vertices, columns = timestamps. A
// non-numeric first row is treated as a header and skipped. Empty cells
// and NaN literals become unknown entries (value 0, mask 0).
CsvData load_csv(const std::string& path);

Mask load_mask_csv(const std::string& path);

void save_matrix_csv(const Matrix& values, const std::string& path);

void save_graph_json(const GraphLaplacian& laplacian, const std::string& path);
GraphLaplacian load_graph_json(const std::string& path);

// Trained coefficients plus the learned Laplacian as a dense dump.
void save_model_json(const AlphaParams& alpha, const GraphLaplacian& laplacian,
                     const std::string& path);

enum class OutputFormat { Csv, Json };
OutputFormat parse_format(const std::string& name);

struct ResultRecord {
  std::string experiment_id;
  double missing_fraction = 0.0;
  std::optional<double> snr_db;
  std::optional<double> normalized_error;
  std::optional<double> normalized_error_std;  // aggregate rows only
  std::optional<double> f_score;
  std::optional<double> f_score_std;  // aggregate rows only
  std::optional<double> stability;
  std::vector<double> alpha;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
  std::string status = "ok";

  bool operator==(const ResultRecord&) const = default;
};

// Bit-stable emission: fixed field order, %.17g floats, LF line endings.
void emit_results(const std::vector<ResultRecord>& records,
                  const std::string& path, OutputFormat format);

std::vector<ResultRecord> parse_results_csv(const std::string& path);
std::vector<ResultRecord> parse_results_json(const std::string& path);

// %.17g, shared by every writer so files round-trip losslessly.
std::string format_double(double v);

}  // namespace jigl
