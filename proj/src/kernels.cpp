#include "jigl/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jigl::kernels {

namespace {

Mode initial_mode() {
#ifdef _OPENMP
  if (const char* env = std::getenv("JIGL_SERIAL"); env && env[0] == '1') {
    return Mode::Serial;
  }
  return Mode::Parallel;
#else
  return Mode::Serial;
#endif
}

std::atomic<Mode> g_mode{initial_mode()};

// Below this many multiply-adds a parallel team costs more than it saves.
constexpr long kParallelWorkThreshold = 1 << 15;

void check_product_dims(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument(
        "matmul: inner dimensions disagree (" + std::to_string(a.cols()) +
        " vs " + std::to_string(b.rows()) + ")");
  }
}

void check_same_shape(const Matrix& a, const Matrix& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(who) + ": shapes disagree");
  }
}

}  // namespace

void set_mode(Mode m) { g_mode.store(m); }
Mode mode() { return g_mode.load(); }

bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_product_dims(a, b);
  const Eigen::Index n = a.rows();
  const Eigen::Index k = a.cols();
  const Eigen::Index m = b.cols();
  Matrix c = Matrix::Zero(n, m);
  const bool par =
      mode() == Mode::Parallel && n * k * m >= kParallelWorkThreshold;
  // Column-major axpy form: c(:,j) += a(:,l) * b(l,j). Each output column
  // belongs to exactly one iteration, and the l-order per element matches
  // the serial reference.
#pragma omp parallel for schedule(static) if (par)
  for (Eigen::Index j = 0; j < m; ++j) {
    double* cj = c.col(j).data();
    for (Eigen::Index l = 0; l < k; ++l) {
      const double blj = b(l, j);
      if (blj == 0.0) continue;
      const double* al = a.col(l).data();
      for (Eigen::Index i = 0; i < n; ++i) cj[i] += al[i] * blj;
    }
  }
  return c;
}

double fro_dot(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "fro_dot");
  const Eigen::Index n = a.rows();
  const Eigen::Index m = a.cols();
  Eigen::VectorXd col_sums = Eigen::VectorXd::Zero(m);
  const bool par = mode() == Mode::Parallel && n * m >= kParallelWorkThreshold;
#pragma omp parallel for schedule(static) if (par)
  for (Eigen::Index j = 0; j < m; ++j) {
    const double* aj = a.col(j).data();
    const double* bj = b.col(j).data();
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += aj[i] * bj[i];
    col_sums[j] = s;
  }
  // Sequential reduction keeps the result independent of the thread count.
  double total = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) total += col_sums[j];
  return total;
}

Matrix row_covariance(const Matrix& y, const Matrix& known) {
  check_same_shape(y, known, "row_covariance");
  const Eigen::Index n = y.rows();
  const Eigen::Index m = y.cols();
  Matrix c = Matrix::Zero(n, n);
  const bool par =
      mode() == Mode::Parallel && n * n * m / 2 >= kParallelWorkThreshold;
#pragma omp parallel for schedule(dynamic) if (par)
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = u; v < n; ++v) {
      long n_co = 0;
      double su = 0.0, sv = 0.0;
      for (Eigen::Index t = 0; t < m; ++t) {
        if (known(u, t) == 1.0 && known(v, t) == 1.0) {
          ++n_co;
          su += y(u, t);
          sv += y(v, t);
        }
      }
      if (n_co < 2) continue;
      const double mu = su / static_cast<double>(n_co);
      const double mv = sv / static_cast<double>(n_co);
      double acc = 0.0;
      for (Eigen::Index t = 0; t < m; ++t) {
        if (known(u, t) == 1.0 && known(v, t) == 1.0) {
          acc += (y(u, t) - mu) * (y(v, t) - mv);
        }
      }
      const double cov = acc / static_cast<double>(n_co - 1);
      c(u, v) = cov;
      c(v, u) = cov;
    }
  }
  return c;
}

Matrix row_distances(const Matrix& y, const Matrix& known) {
  check_same_shape(y, known, "row_distances");
  const Eigen::Index n = y.rows();
  const Eigen::Index m = y.cols();
  Matrix d = Matrix::Zero(n, n);
  const bool par =
      mode() == Mode::Parallel && n * n * m / 2 >= kParallelWorkThreshold;
#pragma omp parallel for schedule(dynamic) if (par)
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = u + 1; v < n; ++v) {
      long n_co = 0;
      double acc = 0.0;
      for (Eigen::Index t = 0; t < m; ++t) {
        if (known(u, t) == 1.0 && known(v, t) == 1.0) {
          ++n_co;
          const double diff = y(u, t) - y(v, t);
          acc += diff * diff;
        }
      }
      double dist;
      if (n_co == 0) {
        dist = std::numeric_limits<double>::infinity();
      } else {
        dist = std::sqrt(acc * static_cast<double>(m) /
                         static_cast<double>(n_co));
      }
      d(u, v) = dist;
      d(v, u) = dist;
    }
  }
  return d;
}

namespace serial {

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_product_dims(a, b);
  Matrix c = Matrix::Zero(a.rows(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      double s = 0.0;
      for (Eigen::Index l = 0; l < a.cols(); ++l) s += a(i, l) * b(l, j);
      c(i, j) = s;
    }
  }
  return c;
}

double fro_dot(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "fro_dot");
  double total = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) s += a(i, j) * b(i, j);
    total += s;
  }
  return total;
}

Matrix row_covariance(const Matrix& y, const Matrix& known) {
  check_same_shape(y, known, "row_covariance");
  const Eigen::Index n = y.rows();
  const Eigen::Index m = y.cols();
  Matrix c = Matrix::Zero(n, n);
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = u; v < n; ++v) {
      long n_co = 0;
      double su = 0.0, sv = 0.0;
      for (Eigen::Index t = 0; t < m; ++t) {
        if (known(u, t) == 1.0 && known(v, t) == 1.0) {
          ++n_co;
          su += y(u, t);
          sv += y(v, t);
        }
      }
      if (n_co < 2) continue;
      const double mu = su / static_cast<double>(n_co);
      const double mv = sv / static_cast<double>(n_co);
      double acc = 0.0;
      for (Eigen::Index t = 0; t < m; ++t) {
        if (known(u, t) == 1.0 && known(v, t) == 1.0) {
          acc += (y(u, t) - mu) * (y(v, t) - mv);
        }
      }
      const double cov = acc / static_cast<double>(n_co - 1);
      c(u, v) = cov;
      c(v, u) = cov;
    }
  }
  return c;
}

Matrix row_distances(const Matrix& y, const Matrix& known) {
  check_same_shape(y, known, "row_distances");
  const Eigen::Index n = y.rows();
  const Eigen::Index m = y.cols();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = u + 1; v < n; ++v) {
      long n_co = 0;
      double acc = 0.0;
      for (Eigen::Index t = 0; t < m; ++t) {
        if (known(u, t) == 1.0 && known(v, t) == 1.0) {
          ++n_co;
          const double diff = y(u, t) - y(v, t);
          acc += diff * diff;
        }
      }
      double dist;
      if (n_co == 0) {
        dist = std::numeric_limits<double>::infinity();
      } else {
        dist = std::sqrt(acc * static_cast<double>(m) /
                         static_cast<double>(n_co));
      }
      d(u, v) = dist;
      d(v, u) = dist;
    }
  }
  return d;
}

}  // namespace serial

}  // namespace jigl::kernels
