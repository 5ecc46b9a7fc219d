#include "jigl/synth.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "jigl/rng.hpp"

namespace jigl {

namespace {

bool connected(const Matrix& w) {
  const Eigen::Index n = w.rows();
  std::vector<char> seen(n, 0);
  std::vector<Eigen::Index> stack{0};
  seen[0] = 1;
  Eigen::Index reached = 1;
  while (!stack.empty()) {
    const Eigen::Index u = stack.back();
    stack.pop_back();
    for (Eigen::Index v = 0; v < n; ++v) {
      if (w(u, v) > 0.0 && !seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == n;
}

// pinv(A)^{1/2} for a symmetric PSD matrix, zeroing eigenvalues below
// 1e-10 * lambda_max before the inverse square root.
Matrix pseudo_inverse_sqrt(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("pseudo_inverse_sqrt: eigendecomposition failed");
  }
  const Vector& values = es.eigenvalues();
  const Matrix& vectors = es.eigenvectors();
  const double cutoff = 1e-10 * std::max(values.cwiseAbs().maxCoeff(), 0.0);
  Vector scaled(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    scaled[i] = values[i] > cutoff ? 1.0 / std::sqrt(values[i]) : 0.0;
  }
  Matrix r = vectors * scaled.asDiagonal() * vectors.transpose();
  return 0.5 * (r + r.transpose()).eval();
}

}  // namespace

void SynthConfig::validate() const {
  if (n_vertices < 2) {
    throw std::invalid_argument("SynthConfig: need at least 2 vertices");
  }
  if (n_timestamps < 2) {
    throw std::invalid_argument("SynthConfig: need at least 2 timestamps");
  }
  if (!(edge_prob > 0.0 && edge_prob < 1.0)) {
    throw std::invalid_argument("SynthConfig: edge_prob must be in (0, 1)");
  }
}

GraphLaplacian er_graph(int n, double p, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("er_graph: need n >= 2");
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("er_graph: p must be in (0, 1)");
  }
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution edge(p);
  constexpr int kMaxAttempts = 100;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Matrix w = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (edge(rng)) {
          w(i, j) = 1.0;
          w(j, i) = 1.0;
        }
      }
    }
    if (connected(w)) return GraphLaplacian::from_weights(w);
  }
  throw std::runtime_error(
      "er_graph: no connected sample in " + std::to_string(kMaxAttempts) +
      " attempts (n = " + std::to_string(n) + ", p = " + std::to_string(p) +
      ")");
}

TimeSeriesMatrix gsd_on_graph(const GraphLaplacian& laplacian,
                              const AlphaParams& alpha_true, int m,
                              std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("gsd_on_graph: need m >= 2");
  const int n = laplacian.size();
  Eigen::SelfAdjointEigenSolver<Matrix> es(laplacian.matrix());
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("gsd_on_graph: eigendecomposition failed");
  }
  const Vector& sigma = es.eigenvalues();
  const double cutoff = 1e-10 * std::max(sigma.cwiseAbs().maxCoeff(), 0.0);

  // Independent columns in the eigenbasis; null directions get zero
  // variance so the constant component carries no energy.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix y(n, m);
  for (int t = 0; t < m; ++t) {
    for (int i = 0; i < n; ++i) {
      const double z = gauss(rng);
      y(i, t) = sigma[i] > cutoff ? z / std::sqrt(sigma[i]) : 0.0;
    }
  }
  const Matrix x = es.eigenvectors() * y;
  const Matrix coloring =
      pseudo_inverse_sqrt(build_kernel(alpha_true, m).matrix());
  return TimeSeriesMatrix(x * coloring);
}

std::pair<TimeSeriesMatrix, GraphLaplacian> gsd(const SynthConfig& config) {
  config.validate();
  GraphLaplacian laplacian =
      er_graph(config.n_vertices, config.edge_prob, derive_seed(config.seed, 0));
  TimeSeriesMatrix x =
      gsd_on_graph(laplacian, config.alpha_true, config.n_timestamps,
                   derive_seed(config.seed, 1));
  return {std::move(x), std::move(laplacian)};
}

Mask sample_mask(int n, int m, double missing_fraction, std::uint64_t seed) {
  if (n < 1 || m < 2) {
    throw std::invalid_argument("sample_mask: need n >= 1 and m >= 2");
  }
  if (!(missing_fraction >= 0.0 && missing_fraction < 1.0)) {
    throw std::invalid_argument(
        "sample_mask: missing_fraction must be in [0, 1)");
  }
  const long total = static_cast<long>(n) * m;
  const long zeros = std::lround(missing_fraction * static_cast<double>(total));
  if (zeros > static_cast<long>(n) * (m - 2)) {
    throw std::runtime_error(
        "sample_mask: fraction " + std::to_string(missing_fraction) +
        " cannot leave 2 observed entries per row");
  }
  if (zeros == 0) return Mask::ones(n, m);

  std::mt19937_64 rng(seed);
  std::vector<long> cells(total);
  constexpr int kMaxAttempts = 10000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    for (long i = 0; i < total; ++i) cells[i] = i;
    // Partial Fisher-Yates: the first `zeros` slots become the hidden cells.
    for (long i = 0; i < zeros; ++i) {
      std::uniform_int_distribution<long> pick(i, total - 1);
      std::swap(cells[i], cells[pick(rng)]);
    }
    Matrix known = Matrix::Ones(n, m);
    for (long i = 0; i < zeros; ++i) {
      known(cells[i] % n, cells[i] / n) = 0.0;
    }
    bool rows_ok = true;
    for (int i = 0; i < n && rows_ok; ++i) {
      rows_ok = known.row(i).sum() >= 2.0;
    }
    if (rows_ok) return Mask(std::move(known));
  }
  throw std::runtime_error(
      "sample_mask: no row-feasible mask in " + std::to_string(kMaxAttempts) +
      " attempts");
}

TimeSeriesMatrix add_noise(const TimeSeriesMatrix& x, double snr_db,
                           std::uint64_t seed) {
  const double signal_power = x.values().squaredNorm();
  if (!(signal_power > 0.0)) {
    throw std::invalid_argument("add_noise: zero-signal input");
  }
  const double entries = static_cast<double>(x.values().size());
  const double noise_variance =
      signal_power / (entries * std::pow(10.0, snr_db / 10.0));
  const double sigma = std::sqrt(noise_variance);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix noisy = x.values();
  for (Eigen::Index t = 0; t < noisy.cols(); ++t) {
    for (Eigen::Index i = 0; i < noisy.rows(); ++i) {
      noisy(i, t) += sigma * gauss(rng);
    }
  }
  return TimeSeriesMatrix(std::move(noisy));
}

}  // namespace jigl
