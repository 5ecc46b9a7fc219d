#pragma once

#include <set>
#include <utility>
#include <vector>

#include "jigl/core.hpp"

namespace jigl {

// Undirected edge set over 0-based vertices; pairs stored with i < j.
class EdgeSet {
 public:
  EdgeSet(int n_vertices, std::set<std::pair<int, int>> edges);

  int n_vertices() const { return n_vertices_; }
  const std::set<std::pair<int, int>>& edges() const { return edges_; }
  std::size_t size() const { return edges_.size(); }

 private:
  int n_vertices_;
  std::set<std::pair<int, int>> edges_;
};

// ||(11^T - psi) o (x_hat - x)||_F divided by the missing-entry count,
// exactly as the evaluation metric is defined. Throws when nothing is
// missing.
double normalized_error(const TimeSeriesMatrix& x_true,
                        const TimeSeriesMatrix& x_hat, const Mask& psi);

// RMSE over the missing entries; companion metric under a distinct name.
double missing_rmse(const TimeSeriesMatrix& x_true,
                    const TimeSeriesMatrix& x_hat, const Mask& psi);

// Edge (i, j) is kept iff -L_ij exceeds threshold times the largest
// off-diagonal magnitude (relative thresholding, so binarize(cL) ==
// binarize(L) for c > 0).
EdgeSet binarize(const GraphLaplacian& l, double threshold = 0.1);

// Harmonic mean of edge precision and recall. Both empty -> 1, exactly one
// empty -> 0.
double f_score(const EdgeSet& learned, const EdgeSet& truth);

// Fraction of missing entries.
double sensing_ratio(const Mask& psi);

// Mean pairwise f_score between the binarized graphs.
double stability_score(const std::vector<GraphLaplacian>& laplacians,
                       double threshold = 0.1);

}  // namespace jigl
