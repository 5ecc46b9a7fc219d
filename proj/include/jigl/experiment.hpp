#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jigl/core.hpp"
#include "jigl/io.hpp"

namespace jigl {

// One config drives every CLI mode. Flags override file values; file
// values override the defaults below.
struct ExperimentConfig {
  std::string mode = "train";  // synth | inpaint | learn | train | sweep

  std::optional<std::string> data_path;   // CSV; synthesized when absent
  std::optional<std::string> graph_path;  // reference / fixed graph (JSON)
  std::optional<std::string> mask_path;   // explicit mask (CSV of 0/1)

  double mask_fraction = 0.3;
  int repeats = 20;
  std::uint64_t seed = 1;
  Hyperparams hp;
  std::vector<double> alpha0 = {1.0, 1.0, 1.0};  // initial / fixed kernel

  std::vector<double> sweep_fractions;  // sweep mode, fraction grid
  std::vector<double> sweep_snrs;       // sweep mode, SNR grid (dB)
  std::optional<double> snr_db;         // fixed noise level
  int stability_masks = 0;              // > 0 switches sweep to stability

  double threshold = 0.1;  // binarization for F-scores
  int workers = 1;
  bool warm_start = true;
  bool degree_floor = false;
  bool timing = false;  // keep measured wall_seconds in emitted records

  std::string output_path;  // results file; empty = do not write
  OutputFormat format = OutputFormat::Csv;

  // Synthetic generation (mode synth, or any mode without --data).
  int n_vertices = 20;
  int n_timestamps = 100;
  double edge_prob = 0.3;
  std::vector<double> alpha_true = {1.0, 4.0, 1.66};

  // Mode-specific artifact outputs.
  std::optional<std::string> data_out;    // synth: dataset CSV
  std::optional<std::string> graph_out;   // synth/learn: Laplacian JSON
  std::optional<std::string> model_out;   // train: alpha + Laplacian JSON
  std::optional<std::string> filled_out;  // inpaint/train: completed CSV

  void validate() const;
};

ExperimentConfig load_config_json(const std::string& path);
void apply_config_json(const std::string& path, ExperimentConfig* config);
std::string config_to_json(const ExperimentConfig& config);

// Runs the configured experiment, writes any configured artifacts, and
// returns the result records (also written to output_path when set).
// Deterministic for a fixed config: per-trial seeds derive from
// config.seed, aggregation is a fixed sequential reduction, and
// wall_seconds is zeroed unless timing is requested.
std::vector<ResultRecord> run_experiment(const ExperimentConfig& config);

}  // namespace jigl
