#include "jigl/unroll.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "jigl/graphlearn.hpp"
#include "jigl/inpaint.hpp"

namespace jigl {

UnrollState forward(const TimeSeriesMatrix& y, const Mask& psi,
                    const AlphaParams& alpha, const Hyperparams& hp,
                    const ForwardOptions& options) {
  hp.validate();
  GraphLaplacian laplacian = covariance_init(y, psi);
  Matrix x_prev;
  bool have_prev = false;
  InpaintResult last_emd{y, 0, 0.0, {}};
  for (int layer = 1; layer <= hp.k_unroll; ++layer) {
    try {
      EmdOptions emd_options;
      if (options.warm_start && have_prev) emd_options.warm_start = &x_prev;
      last_emd = emd(y, psi, laplacian, alpha, hp.lambda, hp.k1, emd_options);
      GlOptions gl_options;
      gl_options.degree_floor = options.degree_floor;
      GraphLearnResult learned =
          gl(y, last_emd.x_hat, laplacian, alpha, hp.k2, hp.beta, hp.eta,
             gl_options);
      laplacian = std::move(learned.laplacian);
    } catch (const std::exception& e) {
      throw std::runtime_error("forward: layer " + std::to_string(layer) +
                               ": " + e.what());
    }
    x_prev = last_emd.x_hat.values();
    have_prev = true;
  }
  return UnrollState{std::move(last_emd.x_hat), std::move(laplacian), alpha,
                     hp.k_unroll};
}

double loss(const UnrollState& state, const TimeSeriesMatrix& y,
            const Mask& psi, const Hyperparams& hp) {
  if (state.x_hat.n_vertices() != y.n_vertices() ||
      state.x_hat.n_timestamps() != y.n_timestamps()) {
    throw std::invalid_argument("loss: state shape does not match data");
  }
  const double fidelity =
      (y.values() - psi.known().cwiseProduct(state.x_hat.values()))
          .squaredNorm();
  const double variation =
      graph_variation(state.x_hat, state.laplacian, state.alpha);
  const double graph_norm = state.laplacian.matrix().squaredNorm();
  const double kernel_norm =
      build_kernel(state.alpha, y.n_timestamps()).matrix().squaredNorm();
  return fidelity + hp.lambda * variation + hp.beta * graph_norm +
         hp.gamma * kernel_norm;
}

namespace {

Vector finite_difference_gradient(
    const std::function<double(const Vector&)>& f, const Vector& alpha,
    double current_value) {
  Vector grad(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    const double h = 1e-3 * std::max(1.0, std::abs(alpha[i]));
    Vector up = alpha;
    up[i] += h;
    const double f_up = f(up);
    Vector down = alpha;
    down[i] -= h;
    // Central difference when the downward step stays in the feasible
    // cone; one-sided at the boundary.
    const bool down_feasible = down[i] >= 0.0 && down.maxCoeff() > 0.0;
    if (down_feasible) {
      grad[i] = (f_up - f(down)) / (2.0 * h);
    } else {
      grad[i] = (f_up - current_value) / h;
    }
  }
  return grad;
}

}  // namespace

std::pair<AlphaParams, TrainTrace> train_alpha(const TimeSeriesMatrix& y,
                                               const Mask& psi,
                                               const AlphaParams& alpha0,
                                               const Hyperparams& hp,
                                               const ForwardOptions& options) {
  hp.validate();
  TrainTrace trace;
  if (hp.train_epochs == 0) return {alpha0, trace};

  auto evaluate = [&](const Vector& coeffs) {
    const AlphaParams a{Vector(coeffs)};
    const UnrollState state = forward(y, psi, a, hp, options);
    return loss(state, y, psi, hp);
  };

  Vector alpha = alpha0.coeffs();
  double lr = hp.train_lr;
  double previous_loss = std::numeric_limits<double>::infinity();
  for (int epoch = 0; epoch < hp.train_epochs; ++epoch) {
    const double current = evaluate(alpha);
    if (!std::isfinite(current)) {
      std::string coeffs;
      for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        coeffs += (i ? ", " : "") + std::to_string(alpha[i]);
      }
      throw std::runtime_error(
          "train_alpha: non-finite loss at epoch " + std::to_string(epoch) +
          " with alpha = (" + coeffs + ")");
    }
    const Vector grad = finite_difference_gradient(evaluate, alpha, current);
    trace.loss_per_epoch.push_back(current);
    trace.alpha_per_epoch.emplace_back(Vector(alpha));
    trace.grad_norm_per_epoch.push_back(grad.norm());

    if (current > previous_loss) lr = std::max(lr / 2.0, 1e-5);
    previous_loss = current;

    Vector candidate = (alpha - lr * grad).cwiseMax(0.0);
    if (candidate.maxCoeff() <= 0.0) {
      // A step that zeroes every coefficient is rejected; shrink instead.
      lr = std::max(lr / 2.0, 1e-5);
      continue;
    }
    alpha = candidate;
  }

  const auto best = std::min_element(trace.loss_per_epoch.begin(),
                                     trace.loss_per_epoch.end());
  const auto best_index =
      static_cast<std::size_t>(best - trace.loss_per_epoch.begin());
  return {trace.alpha_per_epoch[best_index], trace};
}

}  // namespace jigl
