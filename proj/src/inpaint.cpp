#include "jigl/inpaint.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "jigl/kernels.hpp"

namespace jigl {

namespace {

void check_shapes(const TimeSeriesMatrix& y, const Mask& psi,
                  const GraphLaplacian& l, const char* who) {
  if (psi.n_vertices() != y.n_vertices() ||
      psi.n_timestamps() != y.n_timestamps()) {
    throw std::invalid_argument(std::string(who) + ": mask shape " +
                                std::to_string(psi.n_vertices()) + "x" +
                                std::to_string(psi.n_timestamps()) +
                                " does not match data");
  }
  if (l.size() != y.n_vertices()) {
    throw std::invalid_argument(std::string(who) +
                                ": Laplacian size does not match data");
  }
}

void check_masked(const TimeSeriesMatrix& y, const Mask& psi,
                  const char* who) {
  const Matrix& v = y.values();
  const Matrix& k = psi.known();
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (k(i, j) == 0.0 && v(i, j) != 0.0) {
        throw std::invalid_argument(std::string(who) +
                                    ": y has a nonzero entry outside the "
                                    "mask at (" +
                                    std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
      }
    }
  }
}

}  // namespace

double inpaint_objective(const TimeSeriesMatrix& e, const TimeSeriesMatrix& y,
                         const Mask& psi, const GraphLaplacian& l,
                         const AlphaParams& alpha, double lambda) {
  check_shapes(y, psi, l, "inpaint_objective");
  if (e.n_vertices() != y.n_vertices() ||
      e.n_timestamps() != y.n_timestamps()) {
    throw std::invalid_argument("inpaint_objective: E shape mismatch");
  }
  const double fidelity =
      (psi.known().cwiseProduct(e.values()) - y.values()).squaredNorm();
  return fidelity + lambda * graph_variation(e, l, alpha);
}

Matrix inpaint_gradient(const TimeSeriesMatrix& e, const TimeSeriesMatrix& y,
                        const Mask& psi, const GraphLaplacian& l,
                        const AlphaParams& alpha, double lambda) {
  check_shapes(y, psi, l, "inpaint_gradient");
  if (e.n_vertices() != y.n_vertices() ||
      e.n_timestamps() != y.n_timestamps()) {
    throw std::invalid_argument("inpaint_gradient: E shape mismatch");
  }
  const TemporalKernel z = build_kernel(alpha, y.n_timestamps());
  const Matrix smooth =
      kernels::matmul(kernels::matmul(l.matrix(), e.values()), z.matrix());
  return 2.0 * (psi.known().cwiseProduct(e.values()) - y.values()) +
         (2.0 * lambda) * smooth;
}

InpaintResult emd(const TimeSeriesMatrix& y, const Mask& psi,
                  const GraphLaplacian& l, const AlphaParams& alpha,
                  double lambda, int k1, const EmdOptions& options) {
  check_shapes(y, psi, l, "emd");
  check_masked(y, psi, "emd");
  if (k1 < 1) {
    throw std::invalid_argument("emd: k1 must be >= 1");
  }
  if (lambda < 0.0) {
    throw std::invalid_argument("emd: lambda must be >= 0");
  }
  const Matrix& ym = y.values();
  const Matrix& known = psi.known();
  const Matrix& lm = l.matrix();
  const Matrix z = build_kernel(alpha, y.n_timestamps()).matrix();

  // System operator of the quadratic: A(V) = psi o V + lambda L V Z.
  auto apply = [&](const Matrix& v) -> Matrix {
    Matrix out = known.cwiseProduct(v);
    if (lambda != 0.0) {
      out += lambda * kernels::matmul(kernels::matmul(lm, v), z);
    }
    return out;
  };
  // f(X) = <X, A(X)> - 2 <Y, X> + ||Y||^2, recovered from the maintained
  // gradient G = 2 (A(X) - Y) without extra products.
  const double y_sq = ym.squaredNorm();
  auto objective_from_gradient = [&](const Matrix& x, const Matrix& g) {
    // <X, A(X)> = <X, G/2 + Y>
    return kernels::fro_dot(x, 0.5 * g + ym) - 2.0 * kernels::fro_dot(ym, x) +
           y_sq;
  };

  Matrix x = options.warm_start != nullptr
                 ? *options.warm_start
                 : Matrix::Zero(ym.rows(), ym.cols());
  if (options.warm_start != nullptr &&
      (x.rows() != ym.rows() || x.cols() != ym.cols())) {
    throw std::invalid_argument("emd: warm start shape mismatch");
  }

  Matrix grad = 2.0 * (apply(x) - ym);
  Matrix dir = -grad;
  double grad_sq = grad.squaredNorm();
  const double stop = std::max(tol::kCgRelStop * std::sqrt(y_sq), 1e-14);

  InpaintResult result{TimeSeriesMatrix(x), 0, std::sqrt(grad_sq), {}};
  result.objective_trace.push_back(objective_from_gradient(x, grad));

  int iterations = 0;
  for (int it = 0; it < k1; ++it) {
    if (std::sqrt(grad_sq) <= stop) break;
    const Matrix a_dir = apply(dir);
    const double denom = 2.0 * kernels::fro_dot(dir, a_dir);
    if (!(denom > 0.0) || !std::isfinite(denom)) break;
    const double tau = -kernels::fro_dot(grad, dir) / denom;
    x += tau * dir;
    const Matrix grad_next = grad + (2.0 * tau) * a_dir;
    const double grad_next_sq = grad_next.squaredNorm();
    const double momentum = grad_next_sq / grad_sq;  // Fletcher-Reeves
    dir = -grad_next + momentum * dir;
    grad = grad_next;
    grad_sq = grad_next_sq;
    ++iterations;
    if (!x.allFinite() || !std::isfinite(grad_sq)) {
      throw std::runtime_error(
          "emd: non-finite iterate at CG step " + std::to_string(iterations) +
          " (divergence)");
    }
    result.objective_trace.push_back(objective_from_gradient(x, grad));
  }

  result.x_hat = TimeSeriesMatrix(std::move(x));
  result.iterations_run = iterations;
  result.final_gradient_norm = std::sqrt(grad_sq);
  return result;
}

TimeSeriesMatrix direct_solve_oracle(const TimeSeriesMatrix& y,
                                     const Mask& psi, const GraphLaplacian& l,
                                     const AlphaParams& alpha, double lambda) {
  check_shapes(y, psi, l, "direct_solve_oracle");
  check_masked(y, psi, "direct_solve_oracle");
  const Eigen::Index n = y.n_vertices();
  const Eigen::Index m = y.n_timestamps();
  const Eigen::Index nm = n * m;
  if (nm > 4096) {
    throw std::invalid_argument(
        "direct_solve_oracle: N*M = " + std::to_string(nm) +
        " exceeds the dense-system cap of 4096");
  }
  if (lambda == 0.0 && psi.n_missing() > 0) {
    throw std::runtime_error(
        "direct_solve_oracle: singular system (lambda = 0 with missing "
        "entries)");
  }
  const Matrix z = build_kernel(alpha, static_cast<int>(m)).matrix();
  const Matrix& lm = l.matrix();
  const Matrix& known = psi.known();

  // Column-major vectorization: vec(L X Z) = (Z kron L) vec(X).
  Matrix system = Matrix::Zero(nm, nm);
  for (Eigen::Index jcol = 0; jcol < m; ++jcol) {
    for (Eigen::Index lcol = 0; lcol < m; ++lcol) {
      const double zjl = z(jcol, lcol);
      if (zjl == 0.0) continue;
      system.block(jcol * n, lcol * n, n, n) = (lambda * zjl) * lm;
    }
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      system(j * n + i, j * n + i) += known(i, j);
    }
  }
  Eigen::VectorXd rhs(nm);
  for (Eigen::Index j = 0; j < m; ++j) rhs.segment(j * n, n) = y.values().col(j);

  // Minimum-norm least-squares solve; flat directions of the quadratic are
  // fine as long as the system stays consistent.
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(system);
  const Eigen::VectorXd solution = cod.solve(rhs);
  const double residual = (system * solution - rhs).norm();
  if (!(residual <= 1e-8 * std::max(1.0, rhs.norm()))) {
    throw std::runtime_error(
        "direct_solve_oracle: singular system (optimality equations "
        "inconsistent, residual " +
        std::to_string(residual) + ")");
  }
  Matrix x(n, m);
  for (Eigen::Index j = 0; j < m; ++j) x.col(j) = solution.segment(j * n, n);
  return TimeSeriesMatrix(std::move(x));
}

}  // namespace jigl
