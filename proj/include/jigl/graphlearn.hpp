#pragma once

#include <vector>

#include "jigl/core.hpp"

namespace jigl {

// Sign-flip pattern applied before the ReLU in the Laplacian projection:
// 0 on the diagonal, -1 off it.
class ProjectionMask {
 public:
  explicit ProjectionMask(int n);

  const Matrix& matrix() const { return matrix_; }
  int size() const { return static_cast<int>(matrix_.rows()); }

 private:
  Matrix matrix_;
};

struct GraphLearnResult {
  GraphLaplacian laplacian;
  // Tr(X^T L X Z) + beta ||L||_F^2 at the initial point and after every
  // projected step.
  std::vector<double> objective_trace;
  int iterations_run = 0;
  // Filled only when GlOptions::record_iterates is set.
  std::vector<GraphLaplacian> iterates;
};

// Gradient of Tr(X^T L X Z(alpha)) + beta ||L||_F^2 with respect to L:
// X Z X^T + 2 beta L, symmetrized against float drift.
Matrix gl_gradient(const TimeSeriesMatrix& x_hat, const GraphLaplacian& l,
                   const AlphaParams& alpha, double beta);

// ReLU projection of an arbitrary square matrix onto valid Laplacians:
// W = relu(A o M_proj), symmetrized, then diag(W 1) - W. With degree_floor
// the weights are rescaled by the reciprocal of the smallest positive
// degree so that connected vertices end up with degree >= 1.
GraphLaplacian project_to_laplacian(const Matrix& a, const ProjectionMask& mask,
                                    bool degree_floor = false);

struct GlOptions {
  bool degree_floor = false;
  bool record_iterates = false;
};

// k2 steps of projected gradient descent on the Laplacian with x_hat and
// alpha fixed. Every iterate is a valid Laplacian by construction.
GraphLearnResult gl(const TimeSeriesMatrix& y, const TimeSeriesMatrix& x_hat,
                    const GraphLaplacian& l0, const AlphaParams& alpha, int k2,
                    double beta, double eta, const GlOptions& options = {});

// Covariance-graph initializer: pairwise-complete sample covariance over
// vertex rows, negative values clamped to zero, rebuilt as a Laplacian.
// Every vertex needs at least two observed entries.
GraphLaplacian covariance_init(const TimeSeriesMatrix& y, const Mask& psi);

// Unweighted symmetrized k-nearest-neighbour graph over vertex rows,
// distances taken on co-observed coordinates and rescaled by coverage.
// Ties break toward the lower vertex index.
GraphLaplacian knn_graph(const TimeSeriesMatrix& y, const Mask& psi, int k);

}  // namespace jigl
