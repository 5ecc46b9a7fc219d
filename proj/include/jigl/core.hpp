#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace jigl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Central tolerance table. Solvers and tests share these so they cannot
// drift apart.
namespace tol {
inline constexpr double kConstruction = 1e-10;  // type-boundary slack
inline constexpr double kProperty = 1e-8;       // relative, property suites
inline constexpr double kGradCheck = 1e-5;      // finite differences
inline constexpr double kOracleMatch = 1e-6;    // CG vs dense solve
inline constexpr double kCgRelStop = 1e-8;      // gradient norm / ||Y||_F
inline constexpr double kDescentSlack = 1e-9;   // relative, monotone traces
}  // namespace tol

// N x M real matrix whose columns are the signals at M successive
// timestamps. All entries finite; M >= 2 so temporal differences exist.
class TimeSeriesMatrix {
 public:
  explicit TimeSeriesMatrix(Matrix values);

  const Matrix& values() const { return values_; }
  int n_vertices() const { return static_cast<int>(values_.rows()); }
  int n_timestamps() const { return static_cast<int>(values_.cols()); }

 private:
  Matrix values_;
};

// Binary known-entry indicator: 1 where the data matrix is observed.
class Mask {
 public:
  explicit Mask(Matrix known);
  static Mask ones(int n, int m);

  const Matrix& known() const { return known_; }
  int n_vertices() const { return static_cast<int>(known_.rows()); }
  int n_timestamps() const { return static_cast<int>(known_.cols()); }
  long n_missing() const;
  long n_known() const;

 private:
  Matrix known_;
};

// Combinatorial graph Laplacian: symmetric, nonpositive off-diagonal,
// zero row sums. Instances are only created through from_weights or
// validate_laplacian, which establish the structure exactly.
class GraphLaplacian {
 public:
  // w: symmetric nonnegative edge-weight matrix; the diagonal is ignored.
  static GraphLaplacian from_weights(const Matrix& w);
  static GraphLaplacian zero(int n);

  const Matrix& matrix() const { return matrix_; }
  int size() const { return static_cast<int>(matrix_.rows()); }

 private:
  struct Unchecked {};
  GraphLaplacian(Matrix m, Unchecked) : matrix_(std::move(m)) {}
  friend struct LaplacianFactory;

  Matrix matrix_;
};

struct LaplacianValidation {
  bool ok = false;
  std::string issue;  // names the first violated property; empty when ok
  std::optional<GraphLaplacian> laplacian;
};

// Accepts a square matrix that is symmetric within tolerance, has
// off-diagonal entries <= tolerance and row sums within tolerance of zero.
// On accept the matrix is re-symmetrized and its row sums made exact.
LaplacianValidation validate_laplacian(const Matrix& a,
                                       double tolerance = tol::kConstruction);

// Temporal-kernel coefficients (alpha_0, ..., alpha_k). Nonnegative, not
// all zero; these are the only trainable parameters of the whole model.
class AlphaParams {
 public:
  explicit AlphaParams(Vector coeffs);
  AlphaParams(std::initializer_list<double> coeffs);

  const Vector& coeffs() const { return coeffs_; }
  int k_poly() const { return static_cast<int>(coeffs_.size()) - 1; }
  int size() const { return static_cast<int>(coeffs_.size()); }
  double operator[](int i) const { return coeffs_[i]; }

 private:
  Vector coeffs_;
};

// M x M kernel Z(alpha) = alpha_0 I + sum_i alpha_i (DD^T)^i. Symmetric by
// construction and positive semidefinite for nonnegative coefficients.
class TemporalKernel {
 public:
  explicit TemporalKernel(Matrix z);

  const Matrix& matrix() const { return matrix_; }
  int size() const { return static_cast<int>(matrix_.rows()); }

 private:
  Matrix matrix_;
};

struct Hyperparams {
  int k_unroll = 5;      // unrolled layers
  int k1 = 50;           // CG iterations per EMD call
  int k2 = 20;           // projected-gradient iterations per GL call
  double eta = 1e-3;     // GL step size
  double beta = 0.1;     // Laplacian Frobenius weight
  double gamma = 1e-3;   // kernel Frobenius weight
  double lambda = 1.0;   // graph-variation weight
  int k_poly = 2;        // kernel polynomial order
  double train_lr = 1e-2;
  int train_epochs = 40;

  void validate() const;  // throws on any nonpositive field
};

// Column differences [x_2 - x_1, ..., x_M - x_{M-1}], N x (M-1).
Matrix temporal_difference(const TimeSeriesMatrix& x);

// The M x (M-1) operator D with X * D == temporal_difference(X).
Matrix difference_operator(int m);

// Cached DD^T and its powers (data independent, reused every CG step).
const Matrix& delta_delta_t(int m);
const Matrix& delta_delta_t_power(int m, int power);

TemporalKernel build_kernel(const AlphaParams& alpha, int m);

// Tr(X^T L X Z) for an already-built kernel.
double variation_trace(const Matrix& x, const Matrix& laplacian,
                       const Matrix& z);

// Graph variation Tr(X^T L X Z(alpha)); a semi-norm in X for alpha >= 0.
double graph_variation(const TimeSeriesMatrix& x, const GraphLaplacian& l,
                       const AlphaParams& alpha);

}  // namespace jigl
