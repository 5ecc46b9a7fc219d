#pragma once

#include <vector>

#include "jigl/core.hpp"

namespace jigl {

struct InpaintResult {
  TimeSeriesMatrix x_hat;
  int iterations_run = 0;
  double final_gradient_norm = 0.0;
  // Objective value at the initial iterate and after every CG step;
  // non-increasing for exact line search on the convex quadratic.
  std::vector<double> objective_trace;
};

// ||psi o E - Y||_F^2 + lambda * Tr(E^T L E Z(alpha)); Y must already be
// masked (zero on unknown entries).
double inpaint_objective(const TimeSeriesMatrix& e, const TimeSeriesMatrix& y,
                         const Mask& psi, const GraphLaplacian& l,
                         const AlphaParams& alpha, double lambda);

// Exact gradient of inpaint_objective with respect to E:
// 2 (psi o E - Y) + 2 lambda L E Z(alpha).
Matrix inpaint_gradient(const TimeSeriesMatrix& e, const TimeSeriesMatrix& y,
                        const Mask& psi, const GraphLaplacian& l,
                        const AlphaParams& alpha, double lambda);

struct EmdOptions {
  // Start CG from this matrix instead of zero (used by the unrolled
  // forward pass to chain layers).
  const Matrix* warm_start = nullptr;
};

// Conjugate-gradient solve of the inpainting subproblem with L and alpha
// fixed. Stops when the gradient norm drops below
// max(tol::kCgRelStop * ||Y||_F, 1e-14) or after k1 iterations.
InpaintResult emd(const TimeSeriesMatrix& y, const Mask& psi,
                  const GraphLaplacian& l, const AlphaParams& alpha,
                  double lambda, int k1, const EmdOptions& options = {});

// Verification oracle: solves the first-order optimality condition
// psi o X + lambda L X Z = Y as a dense (NM x NM) linear system via a
// rank-revealing decomposition, entirely apart from the CG path.
// Requires N*M <= 4096. Throws when the optimality system is inconsistent
// (objective unbounded along a flat direction) or when lambda == 0 with
// missing entries.
TimeSeriesMatrix direct_solve_oracle(const TimeSeriesMatrix& y,
                                     const Mask& psi, const GraphLaplacian& l,
                                     const AlphaParams& alpha, double lambda);

}  // namespace jigl
