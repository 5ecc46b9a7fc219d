#include "jigl/core.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "jigl/kernels.hpp"

namespace jigl {

namespace {

std::string at(Eigen::Index i, Eigen::Index j) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

}  // namespace

struct LaplacianFactory {
  static GraphLaplacian make(Matrix m) {
    return GraphLaplacian(std::move(m), GraphLaplacian::Unchecked{});
  }
};

TimeSeriesMatrix::TimeSeriesMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1) {
    throw std::invalid_argument("TimeSeriesMatrix: need at least one vertex");
  }
  if (values_.cols() < 2) {
    throw std::invalid_argument(
        "TimeSeriesMatrix: need at least two timestamps, got " +
        std::to_string(values_.cols()));
  }
  if (!values_.allFinite()) {
    throw std::invalid_argument("TimeSeriesMatrix: non-finite entry");
  }
}

Mask::Mask(Matrix known) : known_(std::move(known)) {
  if (known_.rows() < 1 || known_.cols() < 1) {
    throw std::invalid_argument("Mask: empty");
  }
  for (Eigen::Index j = 0; j < known_.cols(); ++j) {
    for (Eigen::Index i = 0; i < known_.rows(); ++i) {
      const double v = known_(i, j);
      if (v != 0.0 && v != 1.0) {
        throw std::invalid_argument("Mask: entry at " + at(i, j) +
                                    " is not 0 or 1");
      }
    }
  }
}

Mask Mask::ones(int n, int m) { return Mask(Matrix::Ones(n, m)); }

long Mask::n_known() const { return static_cast<long>(known_.sum()); }

long Mask::n_missing() const {
  return static_cast<long>(known_.size()) - n_known();
}

GraphLaplacian GraphLaplacian::from_weights(const Matrix& w) {
  if (w.rows() != w.cols()) {
    throw std::invalid_argument("from_weights: matrix not square");
  }
  const Eigen::Index n = w.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double degree = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double wij = (w(i, j) + w(j, i)) / 2.0;
      if (wij < 0.0) {
        throw std::invalid_argument("from_weights: negative weight at " +
                                    at(i, j));
      }
      l(i, j) = -wij;
      degree += wij;
    }
    l(i, i) = degree;
  }
  return GraphLaplacian(std::move(l), Unchecked{});
}

GraphLaplacian GraphLaplacian::zero(int n) {
  return GraphLaplacian(Matrix::Zero(n, n), Unchecked{});
}

LaplacianValidation validate_laplacian(const Matrix& a, double tolerance) {
  LaplacianValidation out;
  if (a.rows() != a.cols()) {
    out.issue = "matrix is not square";
    return out;
  }
  if (!a.allFinite()) {
    out.issue = "non-finite entry";
    return out;
  }
  const Eigen::Index n = a.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(a(i, j) - a(j, i)) > tolerance) {
        out.issue = "asymmetric at " + at(i, j) + ": " +
                    std::to_string(a(i, j)) + " vs " + std::to_string(a(j, i));
        return out;
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && a(i, j) > tolerance) {
        out.issue = "positive off-diagonal at " + at(i, j) + ": " +
                    std::to_string(a(i, j));
        return out;
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double row_sum = a.row(i).sum();
    if (std::abs(row_sum) > tolerance) {
      out.issue = "row " + std::to_string(i) + " sums to " +
                  std::to_string(row_sum);
      return out;
    }
  }
  // Exactify: rebuild from the symmetrized nonnegative weights.
  Matrix w = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) w(i, j) = std::max(0.0, -(a(i, j) + a(j, i)) / 2.0);
    }
  }
  out.ok = true;
  out.laplacian = GraphLaplacian::from_weights(w);
  return out;
}

AlphaParams::AlphaParams(Vector coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() < 1) {
    throw std::invalid_argument("AlphaParams: empty coefficient vector");
  }
  if (!coeffs_.allFinite()) {
    throw std::invalid_argument("AlphaParams: non-finite coefficient");
  }
  bool any_positive = false;
  for (Eigen::Index i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] < 0.0) {
      throw std::invalid_argument("AlphaParams: negative coefficient alpha_" +
                                  std::to_string(i));
    }
    if (coeffs_[i] > 0.0) any_positive = true;
  }
  if (!any_positive) {
    throw std::invalid_argument(
        "AlphaParams: all coefficients zero (degenerate kernel)");
  }
}

AlphaParams::AlphaParams(std::initializer_list<double> coeffs)
    : AlphaParams(Eigen::Map<const Vector>(coeffs.begin(),
                                           static_cast<Eigen::Index>(
                                               coeffs.size()))) {}

TemporalKernel::TemporalKernel(Matrix z) : matrix_(std::move(z)) {
  if (matrix_.rows() != matrix_.cols()) {
    throw std::invalid_argument("TemporalKernel: matrix not square");
  }
  if (!matrix_.allFinite()) {
    throw std::invalid_argument("TemporalKernel: non-finite entry");
  }
  for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < matrix_.cols(); ++j) {
      if (std::abs(matrix_(i, j) - matrix_(j, i)) > tol::kConstruction) {
        throw std::invalid_argument("TemporalKernel: asymmetric at " +
                                    at(i, j));
      }
    }
  }
}

void Hyperparams::validate() const {
  auto require_positive = [](double v, const char* name) {
    if (!(v > 0.0)) {
      throw std::invalid_argument(std::string("Hyperparams: ") + name +
                                  " must be positive");
    }
  };
  require_positive(k_unroll, "k_unroll");
  require_positive(k1, "k1");
  require_positive(k2, "k2");
  require_positive(eta, "eta");
  require_positive(beta, "beta");
  require_positive(gamma, "gamma");
  require_positive(lambda, "lambda");
  require_positive(k_poly, "k_poly");
  require_positive(train_lr, "train_lr");
  if (train_epochs < 0) {
    throw std::invalid_argument("Hyperparams: train_epochs must be >= 0");
  }
}

Matrix temporal_difference(const TimeSeriesMatrix& x) {
  const Matrix& v = x.values();
  const Eigen::Index m = v.cols();
  return v.rightCols(m - 1) - v.leftCols(m - 1);
}

Matrix difference_operator(int m) {
  if (m < 2) {
    throw std::invalid_argument("difference_operator: need m >= 2, got " +
                                std::to_string(m));
  }
  Matrix d = Matrix::Zero(m, m - 1);
  for (int j = 0; j < m - 1; ++j) {
    d(j, j) = -1.0;
    d(j + 1, j) = 1.0;
  }
  return d;
}

namespace {

std::mutex g_power_cache_mutex;
std::map<std::pair<int, int>, Matrix> g_power_cache;  // (m, power) -> matrix

Matrix make_delta_delta_t(int m) {
  // Tridiagonal: DD^T has 1 at the temporal endpoints, 2 inside, -1 on the
  // first off-diagonals.
  Matrix p = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    p(i, i) = (i == 0 || i == m - 1) ? 1.0 : 2.0;
    if (i + 1 < m) {
      p(i, i + 1) = -1.0;
      p(i + 1, i) = -1.0;
    }
  }
  return p;
}

}  // namespace

const Matrix& delta_delta_t_power(int m, int power) {
  if (m < 2) {
    throw std::invalid_argument("delta_delta_t_power: need m >= 2");
  }
  if (power < 1) {
    throw std::invalid_argument("delta_delta_t_power: need power >= 1");
  }
  // Map nodes are reference-stable, so returned references outlive the lock.
  std::lock_guard<std::mutex> lock(g_power_cache_mutex);
  auto it = g_power_cache.find({m, 1});
  if (it == g_power_cache.end()) {
    it = g_power_cache.emplace(std::make_pair(m, 1), make_delta_delta_t(m))
             .first;
  }
  const Matrix* base = &it->second;
  const Matrix* current = base;
  for (int p = 2; p <= power; ++p) {
    auto pit = g_power_cache.find({m, p});
    if (pit == g_power_cache.end()) {
      pit = g_power_cache
                .emplace(std::make_pair(m, p), kernels::matmul(*current, *base))
                .first;
    }
    current = &pit->second;
  }
  return *current;
}

const Matrix& delta_delta_t(int m) { return delta_delta_t_power(m, 1); }

TemporalKernel build_kernel(const AlphaParams& alpha, int m) {
  if (m < 2) {
    throw std::invalid_argument("build_kernel: need m >= 2");
  }
  Matrix z = alpha[0] * Matrix::Identity(m, m);
  for (int i = 1; i <= alpha.k_poly(); ++i) {
    if (alpha[i] != 0.0) z += alpha[i] * delta_delta_t_power(m, i);
  }
  return TemporalKernel(std::move(z));
}

double variation_trace(const Matrix& x, const Matrix& laplacian,
                       const Matrix& z) {
  if (laplacian.rows() != x.rows() || laplacian.cols() != x.rows()) {
    throw std::invalid_argument("variation_trace: Laplacian size " +
                                std::to_string(laplacian.rows()) +
                                " does not match vertex count " +
                                std::to_string(x.rows()));
  }
  if (z.rows() != x.cols() || z.cols() != x.cols()) {
    throw std::invalid_argument("variation_trace: kernel size " +
                                std::to_string(z.rows()) +
                                " does not match timestamp count " +
                                std::to_string(x.cols()));
  }
  // Tr(X^T L X Z) = <L X, X Z>_F
  return kernels::fro_dot(kernels::matmul(laplacian, x),
                          kernels::matmul(x, z));
}

double graph_variation(const TimeSeriesMatrix& x, const GraphLaplacian& l,
                       const AlphaParams& alpha) {
  const TemporalKernel z = build_kernel(alpha, x.n_timestamps());
  return variation_trace(x.values(), l.matrix(), z.matrix());
}

}  // namespace jigl
