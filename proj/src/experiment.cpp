#include "jigl/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <tuple>

#include "json.hpp"

#include "jigl/graphlearn.hpp"
#include "jigl/inpaint.hpp"
#include "jigl/metrics.hpp"
#include "jigl/rng.hpp"
#include "jigl/synth.hpp"
#include "jigl/unroll.hpp"

namespace jigl {

namespace {

using nlohmann::json;

const std::vector<std::string> kModes = {"synth", "inpaint", "learn", "train",
                                         "sweep"};

void require_file(const std::optional<std::string>& path, const char* what) {
  if (path && !std::filesystem::exists(*path)) {
    throw std::invalid_argument(std::string(what) + " file does not exist: " +
                                *path);
  }
}

struct Dataset {
  TimeSeriesMatrix x;                   // reference data, holes as 0
  Matrix base_known;                    // 1 where the reference is observed
  std::optional<GraphLaplacian> truth;  // reference graph when available
};

Dataset resolve_dataset(const ExperimentConfig& c) {
  if (c.data_path) {
    CsvData loaded = load_csv(*c.data_path);
    Dataset ds{loaded.values, loaded.mask.known(), std::nullopt};
    if (c.graph_path) ds.truth = load_graph_json(*c.graph_path);
    return ds;
  }
  SynthConfig sc;
  sc.n_vertices = c.n_vertices;
  sc.n_timestamps = c.n_timestamps;
  sc.edge_prob = c.edge_prob;
  sc.alpha_true = AlphaParams{Vector(Eigen::Map<const Vector>(
      c.alpha_true.data(), static_cast<Eigen::Index>(c.alpha_true.size())))};
  sc.seed = derive_seed(c.seed, 100);
  auto [x, truth] = gsd(sc);
  Dataset ds{std::move(x), Matrix::Ones(c.n_vertices, c.n_timestamps),
             std::move(truth)};
  if (c.graph_path) ds.truth = load_graph_json(*c.graph_path);
  return ds;
}

AlphaParams to_alpha(const std::vector<double>& coeffs, const char* what) {
  try {
    return AlphaParams{Vector(Eigen::Map<const Vector>(
        coeffs.data(), static_cast<Eigen::Index>(coeffs.size())))};
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string(what) + ": " + e.what());
  }
}

// Artificial mask on top of any holes already in the data; retries until
// every row keeps at least two observed entries in the combined mask.
Mask sample_trial_mask(const Dataset& ds, double fraction,
                       std::uint64_t seed) {
  const int n = ds.x.n_vertices();
  const int m = ds.x.n_timestamps();
  for (int attempt = 0; attempt < 100; ++attempt) {
    const Mask sampled = sample_mask(n, m, fraction, derive_seed(seed, attempt));
    Matrix combined = ds.base_known.cwiseProduct(sampled.known());
    bool rows_ok = true;
    for (int i = 0; i < n && rows_ok; ++i) {
      rows_ok = combined.row(i).sum() >= 2.0;
    }
    if (rows_ok) return Mask(std::move(combined));
  }
  throw std::runtime_error(
      "run_experiment: could not combine the sampled mask with the data "
      "holes while keeping 2 observations per row");
}

struct TrialResult {
  ResultRecord record;
  std::optional<GraphLaplacian> learned;
};

// One mask draw end to end: (noise) -> train -> forward -> metrics.
TrialResult run_trial(const ExperimentConfig& c, const Dataset& ds,
                      const std::string& id, double fraction,
                      std::optional<double> snr, std::uint64_t trial_seed,
                      const std::optional<AlphaParams>& fixed_alpha) {
  TrialResult out;
  ResultRecord& rec = out.record;
  rec.experiment_id = id;
  rec.missing_fraction = fraction;
  rec.snr_db = snr;
  rec.seed = trial_seed;
  const auto started = std::chrono::steady_clock::now();
  try {
    const Mask psi = c.mask_path
                         ? load_mask_csv(*c.mask_path)
                         : sample_trial_mask(ds, fraction, trial_seed);
    TimeSeriesMatrix data = ds.x;
    if (snr) data = add_noise(data, *snr, derive_seed(trial_seed, 7));
    const TimeSeriesMatrix y(psi.known().cwiseProduct(data.values()));

    ForwardOptions fwd;
    fwd.warm_start = c.warm_start;
    fwd.degree_floor = c.degree_floor;
    AlphaParams alpha = fixed_alpha ? *fixed_alpha
                                    : train_alpha(y, psi, to_alpha(c.alpha0,
                                                                   "alpha0"),
                                                  c.hp, fwd)
                                          .first;
    const UnrollState state = forward(y, psi, alpha, c.hp, fwd);

    // Evaluate only on entries we hid ourselves: file holes have no truth.
    Matrix eval_known = Matrix::Ones(psi.n_vertices(), psi.n_timestamps());
    long eval_missing = 0;
    for (Eigen::Index j = 0; j < eval_known.cols(); ++j) {
      for (Eigen::Index i = 0; i < eval_known.rows(); ++i) {
        if (ds.base_known(i, j) == 1.0 && psi.known()(i, j) == 0.0) {
          eval_known(i, j) = 0.0;
          ++eval_missing;
        }
      }
    }
    if (eval_missing > 0) {
      rec.normalized_error =
          normalized_error(ds.x, state.x_hat, Mask(std::move(eval_known)));
    }
    if (ds.truth) {
      rec.f_score = f_score(binarize(state.laplacian, c.threshold),
                            binarize(*ds.truth, c.threshold));
    }
    rec.alpha.assign(alpha.coeffs().data(),
                     alpha.coeffs().data() + alpha.size());
    out.learned = state.laplacian;
  } catch (const std::exception& e) {
    rec.status = std::string("failed: ") + e.what();
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return out;
}

std::string frac_tag(double fraction) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%g", fraction);
  return buffer;
}

ResultRecord aggregate(const std::vector<TrialResult>& trials,
                       const std::string& id, double fraction,
                       std::optional<double> snr, std::uint64_t seed) {
  ResultRecord agg;
  agg.experiment_id = id;
  agg.missing_fraction = fraction;
  agg.snr_db = snr;
  agg.seed = seed;
  auto mean_std = [&](auto field) -> std::pair<std::optional<double>,
                                               std::optional<double>> {
    std::vector<double> values;
    for (const auto& t : trials) {
      if (t.record.status == "ok" && (t.record.*field)) {
        values.push_back(*(t.record.*field));
      }
    }
    if (values.empty()) return {std::nullopt, std::nullopt};
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var = values.size() > 1 ? var / static_cast<double>(values.size() - 1)
                            : 0.0;
    return {mean, std::sqrt(var)};
  };
  std::tie(agg.normalized_error, agg.normalized_error_std) =
      mean_std(&ResultRecord::normalized_error);
  std::tie(agg.f_score, agg.f_score_std) = mean_std(&ResultRecord::f_score);
  long failed = 0;
  for (const auto& t : trials) {
    if (t.record.status != "ok") ++failed;
  }
  if (failed == static_cast<long>(trials.size())) {
    agg.status = "failed: all trials failed";
  } else if (failed > 0) {
    agg.status = "ok (" + std::to_string(failed) + " trials failed)";
  }
  return agg;
}

void run_trials_parallel(const ExperimentConfig& c,
                         std::vector<TrialResult>* trials,
                         const std::function<TrialResult(int)>& body) {
  const int count = static_cast<int>(trials->size());
#pragma omp parallel for schedule(dynamic) num_threads(c.workers) \
    if (c.workers > 1)
  for (int t = 0; t < count; ++t) {
    (*trials)[t] = body(t);
  }
}

std::vector<ResultRecord> run_sweep(const ExperimentConfig& c,
                                    const Dataset& ds) {
  const bool snr_grid = !c.sweep_snrs.empty();
  std::vector<double> grid = snr_grid ? c.sweep_snrs : c.sweep_fractions;
  std::vector<ResultRecord> records;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double fraction = snr_grid ? c.mask_fraction : grid[g];
    const std::optional<double> snr =
        snr_grid ? std::optional<double>(grid[g]) : c.snr_db;
    const std::string tag = snr_grid ? "snr=" + frac_tag(grid[g])
                                     : "frac=" + frac_tag(grid[g]);
    std::vector<TrialResult> trials(c.repeats);
    run_trials_parallel(c, &trials, [&](int t) {
      return run_trial(c, ds, "sweep:" + tag + ":rep=" + std::to_string(t),
                       fraction, snr,
                       derive_seed(c.seed, 1000 + g, static_cast<std::uint64_t>(t)),
                       std::nullopt);
    });
    ResultRecord agg =
        aggregate(trials, "sweep:" + tag + ":agg", fraction, snr, c.seed);
    for (auto& t : trials) records.push_back(std::move(t.record));
    records.push_back(std::move(agg));
  }
  return records;
}

std::vector<ResultRecord> run_stability(const ExperimentConfig& c,
                                        const Dataset& ds) {
  std::vector<double> fractions =
      c.sweep_fractions.empty() ? std::vector<double>{c.mask_fraction}
                                : c.sweep_fractions;
  std::vector<ResultRecord> records;
  for (std::size_t g = 0; g < fractions.size(); ++g) {
    const double fraction = fractions[g];
    const std::string tag = "stability:frac=" + frac_tag(fraction);
    // Train once per fraction, then rerun the forward pass per mask; the
    // score measures how stable the learned graph is across mask draws.
    const std::uint64_t train_seed = derive_seed(c.seed, 2000 + g);
    ForwardOptions fwd;
    fwd.warm_start = c.warm_start;
    fwd.degree_floor = c.degree_floor;
    const Mask train_mask = sample_trial_mask(ds, fraction, train_seed);
    const TimeSeriesMatrix train_y(
        train_mask.known().cwiseProduct(ds.x.values()));
    const AlphaParams trained =
        train_alpha(train_y, train_mask, to_alpha(c.alpha0, "alpha0"), c.hp,
                    fwd)
            .first;

    std::vector<TrialResult> trials(c.stability_masks);
    run_trials_parallel(c, &trials, [&](int t) {
      return run_trial(c, ds, tag + ":rep=" + std::to_string(t), fraction,
                       c.snr_db,
                       derive_seed(c.seed, 3000 + g, static_cast<std::uint64_t>(t)),
                       trained);
    });
    ResultRecord agg = aggregate(trials, tag + ":agg", fraction, c.snr_db,
                                 c.seed);
    std::vector<GraphLaplacian> learned;
    for (auto& t : trials) {
      if (t.learned) learned.push_back(std::move(*t.learned));
      records.push_back(std::move(t.record));
    }
    if (learned.size() >= 2) {
      agg.stability = stability_score(learned, c.threshold);
    }
    agg.alpha.assign(trained.coeffs().data(),
                     trained.coeffs().data() + trained.size());
    records.push_back(std::move(agg));
  }
  return records;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (std::find(kModes.begin(), kModes.end(), mode) == kModes.end()) {
    throw std::invalid_argument("ExperimentConfig: unknown mode '" + mode +
                                "'");
  }
  require_file(data_path, "data");
  require_file(graph_path, "graph");
  require_file(mask_path, "mask");
  if (!(mask_fraction >= 0.0 && mask_fraction < 1.0)) {
    throw std::invalid_argument(
        "ExperimentConfig: mask_fraction must be in [0, 1)");
  }
  if (repeats < 1) {
    throw std::invalid_argument("ExperimentConfig: repeats must be >= 1");
  }
  if (workers < 1) {
    throw std::invalid_argument("ExperimentConfig: workers must be >= 1");
  }
  if (threshold < 0.0) {
    throw std::invalid_argument("ExperimentConfig: threshold must be >= 0");
  }
  hp.validate();
  to_alpha(alpha0, "ExperimentConfig: alpha0");
  to_alpha(alpha_true, "ExperimentConfig: alpha_true");
  if (mode == "sweep") {
    if (stability_masks < 0) {
      throw std::invalid_argument(
          "ExperimentConfig: stability_masks must be >= 0");
    }
    if (!sweep_fractions.empty() && !sweep_snrs.empty()) {
      throw std::invalid_argument(
          "ExperimentConfig: give either a fraction grid or an SNR grid, "
          "not both");
    }
    if (stability_masks == 0 && sweep_fractions.empty() &&
        sweep_snrs.empty()) {
      throw std::invalid_argument(
          "ExperimentConfig: sweep needs a non-empty grid");
    }
    if (stability_masks == 1) {
      throw std::invalid_argument(
          "ExperimentConfig: stability needs at least 2 masks");
    }
  }
  if (mode == "inpaint" && !graph_path && data_path) {
    throw std::invalid_argument(
        "ExperimentConfig: inpaint on loaded data needs --graph");
  }
}

std::vector<ResultRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Dataset ds = resolve_dataset(config);
  std::vector<ResultRecord> records;

  if (config.mode == "synth") {
    if (config.data_out) save_matrix_csv(ds.x.values(), *config.data_out);
    if (config.graph_out && ds.truth) save_graph_json(*ds.truth,
                                                      *config.graph_out);
    ResultRecord rec;
    rec.experiment_id = "synth";
    rec.seed = config.seed;
    rec.alpha = config.alpha_true;
    records.push_back(std::move(rec));
  } else if (config.mode == "inpaint") {
    // Fixed-graph completion: no training, no graph update.
    ResultRecord rec;
    rec.experiment_id = "inpaint";
    rec.missing_fraction = config.mask_fraction;
    rec.snr_db = config.snr_db;
    rec.seed = config.seed;
    const auto started = std::chrono::steady_clock::now();
    const Mask psi = config.mask_path
                         ? load_mask_csv(*config.mask_path)
                         : sample_trial_mask(ds, config.mask_fraction,
                                             derive_seed(config.seed, 1));
    if (!ds.truth) {
      throw std::invalid_argument("inpaint: no graph available");
    }
    TimeSeriesMatrix data = ds.x;
    if (config.snr_db) {
      data = add_noise(data, *config.snr_db, derive_seed(config.seed, 7));
    }
    const TimeSeriesMatrix y(psi.known().cwiseProduct(data.values()));
    const AlphaParams alpha = to_alpha(config.alpha0, "alpha0");
    const InpaintResult solved =
        emd(y, psi, *ds.truth, alpha, config.hp.lambda, config.hp.k1);
    Matrix eval_known = Matrix::Ones(psi.n_vertices(), psi.n_timestamps());
    long eval_missing = 0;
    for (Eigen::Index j = 0; j < eval_known.cols(); ++j) {
      for (Eigen::Index i = 0; i < eval_known.rows(); ++i) {
        if (ds.base_known(i, j) == 1.0 && psi.known()(i, j) == 0.0) {
          eval_known(i, j) = 0.0;
          ++eval_missing;
        }
      }
    }
    if (eval_missing > 0) {
      rec.normalized_error =
          normalized_error(ds.x, solved.x_hat, Mask(std::move(eval_known)));
    }
    rec.alpha = config.alpha0;
    rec.wall_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - started)
                           .count();
    if (config.filled_out) {
      save_matrix_csv(solved.x_hat.values(), *config.filled_out);
    }
    records.push_back(std::move(rec));
  } else if (config.mode == "train" || config.mode == "learn") {
    TrialResult trial =
        run_trial(config, ds, config.mode, config.mask_fraction, config.snr_db,
                  derive_seed(config.seed, 1), std::nullopt);
    if (trial.learned) {
      const AlphaParams alpha = to_alpha(trial.record.alpha, "trained alpha");
      if (config.model_out) {
        save_model_json(alpha, *trial.learned, *config.model_out);
      }
      if (config.graph_out) save_graph_json(*trial.learned, *config.graph_out);
      if (config.filled_out) {
        // Recompute the estimate for the saved artifact; forward is pure.
        const Mask psi = config.mask_path
                             ? load_mask_csv(*config.mask_path)
                             : sample_trial_mask(
                                   ds, config.mask_fraction,
                                   derive_seed(config.seed, 1));
        TimeSeriesMatrix data = ds.x;
        if (config.snr_db) {
          data = add_noise(data, *config.snr_db,
                           derive_seed(derive_seed(config.seed, 1), 7));
        }
        const TimeSeriesMatrix y(psi.known().cwiseProduct(data.values()));
        ForwardOptions fwd;
        fwd.warm_start = config.warm_start;
        fwd.degree_floor = config.degree_floor;
        const UnrollState state = forward(y, psi, alpha, config.hp, fwd);
        save_matrix_csv(state.x_hat.values(), *config.filled_out);
      }
    }
    records.push_back(std::move(trial.record));
  } else if (config.mode == "sweep") {
    records = config.stability_masks > 0 ? run_stability(config, ds)
                                         : run_sweep(config, ds);
  }

  if (!config.timing) {
    for (auto& r : records) r.wall_seconds = 0.0;
  }
  if (!config.output_path.empty()) {
    emit_results(records, config.output_path, config.format);
  }
  return records;
}

namespace {

template <typename T>
void get_if(const json& j, const char* key, T* out) {
  if (j.contains(key) && !j[key].is_null()) *out = j[key].get<T>();
}

template <typename T>
void get_opt(const json& j, const char* key, std::optional<T>* out) {
  if (j.contains(key) && !j[key].is_null()) *out = j[key].get<T>();
}

}  // namespace

void apply_config_json(const std::string& path, ExperimentConfig* config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": invalid JSON: " + e.what());
  }
  get_if(j, "mode", &config->mode);
  get_opt(j, "data", &config->data_path);
  get_opt(j, "graph", &config->graph_path);
  get_opt(j, "mask", &config->mask_path);
  get_if(j, "mask_fraction", &config->mask_fraction);
  get_if(j, "repeats", &config->repeats);
  get_if(j, "seed", &config->seed);
  get_if(j, "k_unroll", &config->hp.k_unroll);
  get_if(j, "k1", &config->hp.k1);
  get_if(j, "k2", &config->hp.k2);
  get_if(j, "eta", &config->hp.eta);
  get_if(j, "beta", &config->hp.beta);
  get_if(j, "gamma", &config->hp.gamma);
  get_if(j, "lambda", &config->hp.lambda);
  get_if(j, "k_poly", &config->hp.k_poly);
  get_if(j, "train_lr", &config->hp.train_lr);
  get_if(j, "train_epochs", &config->hp.train_epochs);
  get_if(j, "alpha0", &config->alpha0);
  get_if(j, "fractions", &config->sweep_fractions);
  get_if(j, "snrs", &config->sweep_snrs);
  get_opt(j, "snr_db", &config->snr_db);
  get_if(j, "stability_masks", &config->stability_masks);
  get_if(j, "threshold", &config->threshold);
  get_if(j, "workers", &config->workers);
  get_if(j, "warm_start", &config->warm_start);
  get_if(j, "degree_floor", &config->degree_floor);
  get_if(j, "timing", &config->timing);
  get_if(j, "out", &config->output_path);
  if (j.contains("format")) {
    config->format = parse_format(j["format"].get<std::string>());
  }
  get_if(j, "n", &config->n_vertices);
  get_if(j, "m", &config->n_timestamps);
  get_if(j, "p", &config->edge_prob);
  get_if(j, "alpha_true", &config->alpha_true);
  get_opt(j, "data_out", &config->data_out);
  get_opt(j, "graph_out", &config->graph_out);
  get_opt(j, "model_out", &config->model_out);
  get_opt(j, "filled_out", &config->filled_out);
}

ExperimentConfig load_config_json(const std::string& path) {
  ExperimentConfig config;
  apply_config_json(path, &config);
  return config;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["mode"] = c.mode;
  if (c.data_path) j["data"] = *c.data_path;
  if (c.graph_path) j["graph"] = *c.graph_path;
  if (c.mask_path) j["mask"] = *c.mask_path;
  j["mask_fraction"] = c.mask_fraction;
  j["repeats"] = c.repeats;
  j["seed"] = c.seed;
  j["k_unroll"] = c.hp.k_unroll;
  j["k1"] = c.hp.k1;
  j["k2"] = c.hp.k2;
  j["eta"] = c.hp.eta;
  j["beta"] = c.hp.beta;
  j["gamma"] = c.hp.gamma;
  j["lambda"] = c.hp.lambda;
  j["k_poly"] = c.hp.k_poly;
  j["train_lr"] = c.hp.train_lr;
  j["train_epochs"] = c.hp.train_epochs;
  j["alpha0"] = c.alpha0;
  j["fractions"] = c.sweep_fractions;
  j["snrs"] = c.sweep_snrs;
  if (c.snr_db) j["snr_db"] = *c.snr_db;
  j["stability_masks"] = c.stability_masks;
  j["threshold"] = c.threshold;
  j["workers"] = c.workers;
  j["warm_start"] = c.warm_start;
  j["degree_floor"] = c.degree_floor;
  j["timing"] = c.timing;
  j["out"] = c.output_path;
  j["format"] = c.format == OutputFormat::Csv ? "csv" : "json";
  j["n"] = c.n_vertices;
  j["m"] = c.n_timestamps;
  j["p"] = c.edge_prob;
  j["alpha_true"] = c.alpha_true;
  if (c.data_out) j["data_out"] = *c.data_out;
  if (c.graph_out) j["graph_out"] = *c.graph_out;
  if (c.model_out) j["model_out"] = *c.model_out;
  if (c.filled_out) j["filled_out"] = *c.filled_out;
  return j.dump(2);
}

}  // namespace jigl
