#include "jigl/graphlearn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "jigl/kernels.hpp"

namespace jigl {

namespace {

// S = X Z X^T, symmetrized. Constant across GL iterations, so gl computes
// it once and shares this helper with gl_gradient to keep the two paths
// bit-identical.
Matrix variation_term(const Matrix& x, const Matrix& z) {
  const Matrix xz = kernels::matmul(x, z);
  const Matrix xt = x.transpose();
  Matrix s = kernels::matmul(xz, xt);
  s = 0.5 * (s + s.transpose()).eval();
  return s;
}

Matrix gradient_from_term(const Matrix& s, const Matrix& l, double beta) {
  return s + (2.0 * beta) * l;
}

}  // namespace

ProjectionMask::ProjectionMask(int n) {
  if (n < 1) {
    throw std::invalid_argument("ProjectionMask: need n >= 1");
  }
  matrix_ = -Matrix::Ones(n, n);
  matrix_.diagonal().setZero();
}

Matrix gl_gradient(const TimeSeriesMatrix& x_hat, const GraphLaplacian& l,
                   const AlphaParams& alpha, double beta) {
  if (l.size() != x_hat.n_vertices()) {
    throw std::invalid_argument(
        "gl_gradient: Laplacian size does not match vertex count");
  }
  const Matrix z = build_kernel(alpha, x_hat.n_timestamps()).matrix();
  return gradient_from_term(variation_term(x_hat.values(), z), l.matrix(),
                            beta);
}

GraphLaplacian project_to_laplacian(const Matrix& a, const ProjectionMask& mask,
                                    bool degree_floor) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("project_to_laplacian: matrix not square");
  }
  if (mask.size() != a.rows()) {
    throw std::invalid_argument("project_to_laplacian: mask size mismatch");
  }
  // relu(A o M_proj) keeps flipped off-diagonals that encode real edges.
  const Matrix flipped = a.cwiseProduct(mask.matrix());
  const Matrix relu = flipped.cwiseMax(0.0);
  Matrix w = 0.5 * (relu + relu.transpose());
  if (degree_floor) {
    const Vector degrees = w.rowwise().sum();
    double min_positive = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < degrees.size(); ++i) {
      if (degrees[i] > 0.0) min_positive = std::min(min_positive, degrees[i]);
    }
    if (std::isfinite(min_positive) && min_positive > 0.0) {
      w /= min_positive;
    }
  }
  return GraphLaplacian::from_weights(w);
}

GraphLearnResult gl(const TimeSeriesMatrix& y, const TimeSeriesMatrix& x_hat,
                    const GraphLaplacian& l0, const AlphaParams& alpha, int k2,
                    double beta, double eta, const GlOptions& options) {
  if (y.n_vertices() != x_hat.n_vertices() ||
      y.n_timestamps() != x_hat.n_timestamps()) {
    throw std::invalid_argument("gl: y and x_hat shapes disagree");
  }
  if (l0.size() != x_hat.n_vertices()) {
    throw std::invalid_argument("gl: Laplacian size does not match data");
  }
  if (k2 < 1) throw std::invalid_argument("gl: k2 must be >= 1");
  if (!(eta > 0.0)) throw std::invalid_argument("gl: eta must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("gl: beta must be positive");

  const Matrix z = build_kernel(alpha, x_hat.n_timestamps()).matrix();
  const Matrix s = variation_term(x_hat.values(), z);
  const ProjectionMask mask(x_hat.n_vertices());

  auto objective = [&](const Matrix& l) {
    return kernels::fro_dot(l, s) + beta * l.squaredNorm();
  };

  GraphLearnResult result{l0, {}, 0, {}};
  Matrix l = l0.matrix();
  result.objective_trace.push_back(objective(l));
  for (int it = 0; it < k2; ++it) {
    const Matrix step = l - eta * gradient_from_term(s, l, beta);
    GraphLaplacian projected =
        project_to_laplacian(step, mask, options.degree_floor);
    l = projected.matrix();
    const double value = objective(l);
    // The ReLU projection can keep the iterate finite while its objective
    // overflows, so both are checked.
    if (!l.allFinite() || !std::isfinite(value)) {
      throw std::runtime_error("gl: non-finite iterate at step " +
                               std::to_string(it + 1) +
                               " (eta too large?)");
    }
    result.objective_trace.push_back(value);
    if (options.record_iterates) result.iterates.push_back(projected);
    result.laplacian = std::move(projected);
    ++result.iterations_run;
  }
  return result;
}

GraphLaplacian covariance_init(const TimeSeriesMatrix& y, const Mask& psi) {
  if (psi.n_vertices() != y.n_vertices() ||
      psi.n_timestamps() != y.n_timestamps()) {
    throw std::invalid_argument("covariance_init: mask shape mismatch");
  }
  const Matrix& known = psi.known();
  for (Eigen::Index i = 0; i < known.rows(); ++i) {
    if (known.row(i).sum() < 2.0) {
      throw std::runtime_error(
          "covariance_init: vertex " + std::to_string(i) +
          " has fewer than 2 observed entries (underdetermined)");
    }
  }
  Matrix w = kernels::row_covariance(y.values(), known).cwiseMax(0.0);
  w.diagonal().setZero();
  return GraphLaplacian::from_weights(w);
}

GraphLaplacian knn_graph(const TimeSeriesMatrix& y, const Mask& psi, int k) {
  if (psi.n_vertices() != y.n_vertices() ||
      psi.n_timestamps() != y.n_timestamps()) {
    throw std::invalid_argument("knn_graph: mask shape mismatch");
  }
  const int n = y.n_vertices();
  if (k < 1 || k >= n) {
    throw std::invalid_argument("knn_graph: k must satisfy 1 <= k < N, got " +
                                std::to_string(k));
  }
  const Matrix d = kernels::row_distances(y.values(), psi.known());
  Matrix w = Matrix::Zero(n, n);
  std::vector<int> order(n);
  for (int u = 0; u < n; ++u) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (d(u, a) != d(u, b)) return d(u, a) < d(u, b);
      return a < b;  // ties toward the lower index
    });
    int taken = 0;
    for (int idx : order) {
      if (idx == u) continue;
      w(u, idx) = 1.0;
      w(idx, u) = 1.0;
      if (++taken == k) break;
    }
  }
  return GraphLaplacian::from_weights(w);
}

}  // namespace jigl
