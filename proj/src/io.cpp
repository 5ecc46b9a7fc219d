#include "jigl/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace jigl {

namespace {

using nlohmann::json;

std::runtime_error io_error(const std::string& path, const std::string& what) {
  return std::runtime_error(path + ": " + what);
}

std::string trimmed(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(trimmed(line.substr(start)));
      break;
    }
    cells.push_back(trimmed(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

bool is_nan_literal(const std::string& cell) {
  return cell.size() == 3 && (cell[0] == 'n' || cell[0] == 'N') &&
         (cell[1] == 'a' || cell[1] == 'A') &&
         (cell[2] == 'n' || cell[2] == 'N');
}

bool parse_cell(const std::string& cell, double* value) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, *value);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path, "cannot open for reading");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trimmed(line).empty()) lines.push_back(line);
  }
  return lines;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
  if (!out) throw io_error(path, "cannot open for writing");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

CsvData load_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw io_error(path, "empty file");

  std::size_t first_row = 0;
  {
    // Header auto-detection: any cell that is neither numeric nor a
    // missing-value marker makes the first row a header.
    double v;
    for (const auto& cell : split_line(lines[0])) {
      if (!cell.empty() && !is_nan_literal(cell) && !parse_cell(cell, &v)) {
        first_row = 1;
        break;
      }
    }
  }
  if (lines.size() <= first_row) throw io_error(path, "no data rows");

  const std::size_t n = lines.size() - first_row;
  std::size_t m = 0;
  Matrix values;
  Matrix known;
  for (std::size_t r = 0; r < n; ++r) {
    const auto cells = split_line(lines[first_row + r]);
    if (r == 0) {
      m = cells.size();
      values = Matrix::Zero(n, m);
      known = Matrix::Ones(n, m);
    } else if (cells.size() != m) {
      throw io_error(path, "ragged row " + std::to_string(r + 1) + ": " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(m));
    }
    for (std::size_t c = 0; c < m; ++c) {
      const std::string& cell = cells[c];
      if (cell.empty() || is_nan_literal(cell)) {
        known(r, c) = 0.0;  // value stays at the 0 placeholder
        continue;
      }
      double v;
      if (!parse_cell(cell, &v)) {
        throw io_error(path, "non-numeric cell '" + cell + "' at row " +
                                 std::to_string(r + 1) + ", column " +
                                 std::to_string(c + 1));
      }
      values(r, c) = v;
    }
  }
  if (m < 2) throw io_error(path, "need at least 2 timestamp columns");
  return CsvData{TimeSeriesMatrix(std::move(values)), Mask(std::move(known))};
}

Mask load_mask_csv(const std::string& path) {
  CsvData data = load_csv(path);
  if (data.mask.n_missing() != 0) {
    throw io_error(path, "mask file has empty cells");
  }
  return Mask(data.values.values());
}

void save_matrix_csv(const Matrix& values, const std::string& path) {
  auto out = open_for_write(path);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (j) out << ',';
      out << format_double(values(i, j));
    }
    out << '\n';
  }
  if (!out) throw io_error(path, "write failed");
}

void save_graph_json(const GraphLaplacian& laplacian,
                     const std::string& path) {
  json j;
  j["schema_version"] = 1;
  j["n_vertices"] = laplacian.size();
  json rows = json::array();
  for (int i = 0; i < laplacian.size(); ++i) {
    json row = json::array();
    for (int c = 0; c < laplacian.size(); ++c) {
      row.push_back(laplacian.matrix()(i, c));
    }
    rows.push_back(std::move(row));
  }
  j["laplacian"] = std::move(rows);
  auto out = open_for_write(path);
  out << j.dump(2) << '\n';
  if (!out) throw io_error(path, "write failed");
}

GraphLaplacian load_graph_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path, "cannot open for reading");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw io_error(path, std::string("invalid JSON: ") + e.what());
  }
  if (!j.contains("laplacian") || !j["laplacian"].is_array()) {
    throw io_error(path, "missing 'laplacian' array");
  }
  const auto& rows = j["laplacian"];
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw io_error(path, "laplacian is not square");
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  LaplacianValidation check = validate_laplacian(m);
  if (!check.ok) throw io_error(path, "not a valid Laplacian: " + check.issue);
  return *check.laplacian;
}

void save_model_json(const AlphaParams& alpha, const GraphLaplacian& laplacian,
                     const std::string& path) {
  json j;
  j["schema_version"] = 1;
  json coeffs = json::array();
  for (int i = 0; i < alpha.size(); ++i) coeffs.push_back(alpha[i]);
  j["alpha"] = std::move(coeffs);
  j["n_vertices"] = laplacian.size();
  json rows = json::array();
  for (int i = 0; i < laplacian.size(); ++i) {
    json row = json::array();
    for (int c = 0; c < laplacian.size(); ++c) {
      row.push_back(laplacian.matrix()(i, c));
    }
    rows.push_back(std::move(row));
  }
  j["laplacian"] = std::move(rows);
  auto out = open_for_write(path);
  out << j.dump(2) << '\n';
  if (!out) throw io_error(path, "write failed");
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw std::invalid_argument("unknown format '" + name +
                              "' (expected csv or json)");
}

namespace {

constexpr const char* kCsvHeader =
    "experiment_id,missing_fraction,snr_db,normalized_error,"
    "normalized_error_std,f_score,f_score_std,stability,alpha,wall_seconds,"
    "seed,status";

std::string sanitize_field(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return out;
}

std::string opt_str(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::string alpha_str(const std::vector<double>& alpha) {
  std::string out;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (i) out += ';';
    out += format_double(alpha[i]);
  }
  return out;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

void emit_csv(const std::vector<ResultRecord>& records,
              const std::string& path) {
  auto out = open_for_write(path);
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << sanitize_field(r.experiment_id) << ','
        << format_double(r.missing_fraction) << ',' << opt_str(r.snr_db) << ','
        << opt_str(r.normalized_error) << ','
        << opt_str(r.normalized_error_std) << ',' << opt_str(r.f_score) << ','
        << opt_str(r.f_score_std) << ',' << opt_str(r.stability) << ','
        << alpha_str(r.alpha) << ',' << format_double(r.wall_seconds) << ','
        << r.seed << ',' << sanitize_field(r.status) << '\n';
  }
  if (!out) throw io_error(path, "write failed");
}

void emit_json(const std::vector<ResultRecord>& records,
               const std::string& path) {
  // Hand-rolled so numbers are always %.17g and field order is fixed.
  auto out = open_for_write(path);
  out << "{\n  \"schema_version\": 1,\n  \"records\": [";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    auto opt = [](const std::optional<double>& v) {
      return v ? format_double(*v) : std::string("null");
    };
    out << (i ? ",\n    {" : "\n    {");
    out << "\"experiment_id\": \"" << json_escape(r.experiment_id) << "\", ";
    out << "\"missing_fraction\": " << format_double(r.missing_fraction)
        << ", ";
    out << "\"snr_db\": " << opt(r.snr_db) << ", ";
    out << "\"normalized_error\": " << opt(r.normalized_error) << ", ";
    out << "\"normalized_error_std\": " << opt(r.normalized_error_std) << ", ";
    out << "\"f_score\": " << opt(r.f_score) << ", ";
    out << "\"f_score_std\": " << opt(r.f_score_std) << ", ";
    out << "\"stability\": " << opt(r.stability) << ", ";
    out << "\"alpha\": [";
    for (std::size_t a = 0; a < r.alpha.size(); ++a) {
      out << (a ? ", " : "") << format_double(r.alpha[a]);
    }
    out << "], ";
    out << "\"wall_seconds\": " << format_double(r.wall_seconds) << ", ";
    out << "\"seed\": " << r.seed << ", ";
    out << "\"status\": \"" << json_escape(r.status) << "\"}";
  }
  out << "\n  ]\n}\n";
  if (!out) throw io_error(path, "write failed");
}

std::optional<double> parse_opt(const std::string& cell,
                                const std::string& path) {
  if (cell.empty()) return std::nullopt;
  double v;
  if (!parse_cell(cell, &v)) {
    throw io_error(path, "bad numeric field '" + cell + "'");
  }
  return v;
}

std::vector<double> parse_alpha(const std::string& cell,
                                const std::string& path) {
  std::vector<double> out;
  if (cell.empty()) return out;
  std::string::size_type start = 0;
  while (true) {
    const auto semi = cell.find(';', start);
    const std::string piece = cell.substr(
        start, semi == std::string::npos ? std::string::npos : semi - start);
    double v;
    if (!parse_cell(piece, &v)) {
      throw io_error(path, "bad alpha component '" + piece + "'");
    }
    out.push_back(v);
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  return out;
}

}  // namespace

void emit_results(const std::vector<ResultRecord>& records,
                  const std::string& path, OutputFormat format) {
  if (format == OutputFormat::Csv) {
    emit_csv(records, path);
  } else {
    emit_json(records, path);
  }
}

std::vector<ResultRecord> parse_results_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || trimmed(lines[0]) != kCsvHeader) {
    throw io_error(path, "missing or unexpected results header");
  }
  std::vector<ResultRecord> records;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_line(lines[r]);
    if (cells.size() != 12) {
      throw io_error(path, "row " + std::to_string(r + 1) + " has " +
                               std::to_string(cells.size()) +
                               " fields, expected 12");
    }
    ResultRecord rec;
    rec.experiment_id = cells[0];
    double v;
    if (!parse_cell(cells[1], &v)) throw io_error(path, "bad fraction");
    rec.missing_fraction = v;
    rec.snr_db = parse_opt(cells[2], path);
    rec.normalized_error = parse_opt(cells[3], path);
    rec.normalized_error_std = parse_opt(cells[4], path);
    rec.f_score = parse_opt(cells[5], path);
    rec.f_score_std = parse_opt(cells[6], path);
    rec.stability = parse_opt(cells[7], path);
    rec.alpha = parse_alpha(cells[8], path);
    if (!parse_cell(cells[9], &v)) throw io_error(path, "bad wall_seconds");
    rec.wall_seconds = v;
    rec.seed = std::stoull(cells[10]);
    rec.status = cells[11];
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<ResultRecord> parse_results_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path, "cannot open for reading");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw io_error(path, std::string("invalid JSON: ") + e.what());
  }
  if (!j.contains("records") || !j["records"].is_array()) {
    throw io_error(path, "missing 'records' array");
  }
  std::vector<ResultRecord> records;
  for (const auto& item : j["records"]) {
    ResultRecord rec;
    rec.experiment_id = item.at("experiment_id").get<std::string>();
    rec.missing_fraction = item.at("missing_fraction").get<double>();
    auto opt = [&](const char* key) -> std::optional<double> {
      if (!item.contains(key) || item[key].is_null()) return std::nullopt;
      return item[key].get<double>();
    };
    rec.snr_db = opt("snr_db");
    rec.normalized_error = opt("normalized_error");
    rec.normalized_error_std = opt("normalized_error_std");
    rec.f_score = opt("f_score");
    rec.f_score_std = opt("f_score_std");
    rec.stability = opt("stability");
    for (const auto& a : item.at("alpha")) rec.alpha.push_back(a.get<double>());
    rec.wall_seconds = item.at("wall_seconds").get<double>();
    rec.seed = item.at("seed").get<std::uint64_t>();
    rec.status = item.at("status").get<std::string>();
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace jigl
