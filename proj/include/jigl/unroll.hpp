#pragma once

#include <utility>
#include <vector>

#include "jigl/core.hpp"

namespace jigl {

struct UnrollState {
  TimeSeriesMatrix x_hat;
  GraphLaplacian laplacian;
  AlphaParams alpha;
  int layer_index = 0;
};

struct TrainTrace {
  std::vector<double> loss_per_epoch;
  std::vector<AlphaParams> alpha_per_epoch;
  std::vector<double> grad_norm_per_epoch;
};

struct ForwardOptions {
  // Chain EMD layers by starting each CG solve from the previous layer's
  // estimate; false restores a cold start per layer.
  bool warm_start = true;
  bool degree_floor = false;
};

// Unrolled forward pass: covariance-graph init, then k_unroll rounds of
// EMD followed by GL. Returns the final estimate and Laplacian together
// with the (fixed) kernel coefficients that parameterized the network.
UnrollState forward(const TimeSeriesMatrix& y, const Mask& psi,
                    const AlphaParams& alpha, const Hyperparams& hp,
                    const ForwardOptions& options = {});

// Training loss: known-entry residual + lambda * graph variation +
// beta ||L||_F^2 + gamma ||Z(alpha)||_F^2, evaluated on a forward state.
double loss(const UnrollState& state, const TimeSeriesMatrix& y,
            const Mask& psi, const Hyperparams& hp);

// Projected gradient descent on the kernel coefficients. The gradient is a
// central finite difference through the full forward pass (one-sided at
// the alpha >= 0 boundary); the step size halves whenever the loss
// increases, floored at 1e-5. Returns the best-loss coefficients seen.
std::pair<AlphaParams, TrainTrace> train_alpha(const TimeSeriesMatrix& y,
                                               const Mask& psi,
                                               const AlphaParams& alpha0,
                                               const Hyperparams& hp,
                                               const ForwardOptions& options = {});

}  // namespace jigl
