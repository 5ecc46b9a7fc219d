#include "jigl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace jigl {

EdgeSet::EdgeSet(int n_vertices, std::set<std::pair<int, int>> edges)
    : n_vertices_(n_vertices), edges_(std::move(edges)) {
  if (n_vertices_ < 1) throw std::invalid_argument("EdgeSet: need n >= 1");
  for (const auto& [i, j] : edges_) {
    if (i < 0 || j < 0 || i >= n_vertices_ || j >= n_vertices_) {
      throw std::invalid_argument("EdgeSet: vertex out of range");
    }
    if (i >= j) {
      throw std::invalid_argument(
          "EdgeSet: edges must be stored with i < j (no self-loops)");
    }
  }
}

namespace {

double missing_residual_norm(const TimeSeriesMatrix& x_true,
                             const TimeSeriesMatrix& x_hat, const Mask& psi,
                             long* missing_count) {
  if (x_true.n_vertices() != x_hat.n_vertices() ||
      x_true.n_timestamps() != x_hat.n_timestamps() ||
      psi.n_vertices() != x_true.n_vertices() ||
      psi.n_timestamps() != x_true.n_timestamps()) {
    throw std::invalid_argument("normalized_error: shape mismatch");
  }
  const Matrix residual =
      (Matrix::Ones(psi.n_vertices(), psi.n_timestamps()) - psi.known())
          .cwiseProduct(x_hat.values() - x_true.values());
  *missing_count = psi.n_missing();
  return residual.norm();
}

}  // namespace

double normalized_error(const TimeSeriesMatrix& x_true,
                        const TimeSeriesMatrix& x_hat, const Mask& psi) {
  long missing = 0;
  const double norm = missing_residual_norm(x_true, x_hat, psi, &missing);
  if (missing == 0) {
    throw std::invalid_argument(
        "normalized_error: mask has no missing entries");
  }
  return norm / static_cast<double>(missing);
}

double missing_rmse(const TimeSeriesMatrix& x_true,
                    const TimeSeriesMatrix& x_hat, const Mask& psi) {
  long missing = 0;
  const double norm = missing_residual_norm(x_true, x_hat, psi, &missing);
  if (missing == 0) {
    throw std::invalid_argument("missing_rmse: mask has no missing entries");
  }
  return norm / std::sqrt(static_cast<double>(missing));
}

EdgeSet binarize(const GraphLaplacian& l, double threshold) {
  if (threshold < 0.0) {
    throw std::invalid_argument("binarize: threshold must be >= 0");
  }
  const Matrix& lm = l.matrix();
  const int n = l.size();
  double max_weight = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) max_weight = std::max(max_weight, std::abs(lm(i, j)));
    }
  }
  std::set<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (-lm(i, j) > threshold * max_weight) edges.emplace(i, j);
    }
  }
  return EdgeSet(n, std::move(edges));
}

double f_score(const EdgeSet& learned, const EdgeSet& truth) {
  if (learned.n_vertices() != truth.n_vertices()) {
    throw std::invalid_argument("f_score: vertex counts disagree");
  }
  if (learned.size() == 0 && truth.size() == 0) return 1.0;
  if (learned.size() == 0 || truth.size() == 0) return 0.0;
  std::size_t hits = 0;
  for (const auto& e : learned.edges()) hits += truth.edges().count(e);
  if (hits == 0) return 0.0;
  const double precision =
      static_cast<double>(hits) / static_cast<double>(learned.size());
  const double recall =
      static_cast<double>(hits) / static_cast<double>(truth.size());
  return 2.0 * precision * recall / (precision + recall);
}

double sensing_ratio(const Mask& psi) {
  return static_cast<double>(psi.n_missing()) /
         static_cast<double>(psi.known().size());
}

double stability_score(const std::vector<GraphLaplacian>& laplacians,
                       double threshold) {
  if (laplacians.size() < 2) {
    throw std::invalid_argument("stability_score: need at least 2 graphs");
  }
  std::vector<EdgeSet> sets;
  sets.reserve(laplacians.size());
  for (const auto& l : laplacians) sets.push_back(binarize(l, threshold));
  double total = 0.0;
  long pairs = 0;
  for (std::size_t a = 0; a < sets.size(); ++a) {
    for (std::size_t b = a + 1; b < sets.size(); ++b) {
      total += f_score(sets[a], sets[b]);
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

}  // namespace jigl
