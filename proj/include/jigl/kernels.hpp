#pragma once

#include <Eigen/Dense>

// Dense compute kernels shared by the solvers. Every kernel exists twice:
// the default entry points run the OpenMP-parallel version (when built with
// OpenMP and the problem is large enough to pay for a team), and
// kernels::serial holds plain-loop reference implementations used by the
// tests and the benchmark.
//
// Parallel loops split work over disjoint output columns/rows and keep the
// per-element accumulation order fixed, so results are identical to the
// serial reference for any thread count.

namespace jigl::kernels {

using Matrix = Eigen::MatrixXd;

enum class Mode { Serial, Parallel };

// Process-wide execution mode. Defaults to Parallel when compiled with
// OpenMP; the JIGL_SERIAL environment variable (set to 1) forces Serial.
void set_mode(Mode m);
Mode mode();
bool openmp_enabled();
int max_threads();

// c = a * b
Matrix matmul(const Matrix& a, const Matrix& b);

// <a, b>_F = sum_ij a_ij * b_ij, accumulated per column then reduced
// sequentially over columns.
double fro_dot(const Matrix& a, const Matrix& b);

// Pairwise-complete sample covariance between the rows of y, using only
// columns observed (known == 1) for both rows. Pairs with fewer than two
// co-observed columns get covariance 0. Divisor is n_co - 1.
Matrix row_covariance(const Matrix& y, const Matrix& known);

// Euclidean distance between rows of y over co-observed columns, rescaled
// by sqrt(m / n_co) to compensate for coverage. Pairs with no co-observed
// column get +infinity.
Matrix row_distances(const Matrix& y, const Matrix& known);

namespace serial {
Matrix matmul(const Matrix& a, const Matrix& b);
double fro_dot(const Matrix& a, const Matrix& b);
Matrix row_covariance(const Matrix& y, const Matrix& known);
Matrix row_distances(const Matrix& y, const Matrix& known);
}  // namespace serial

}  // namespace jigl::kernels
