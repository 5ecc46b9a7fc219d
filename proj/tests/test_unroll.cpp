#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "jigl/graphlearn.hpp"
#include "jigl/inpaint.hpp"
#include "jigl/metrics.hpp"
#include "jigl/rng.hpp"
#include "jigl/synth.hpp"
#include "jigl/unroll.hpp"
#include "test_util.hpp"

using namespace jigl;
using testutil::random_matrix;

namespace {

Hyperparams small_hp() {
  Hyperparams hp;
  hp.k_unroll = 2;
  hp.k1 = 20;
  hp.k2 = 5;
  hp.eta = 1e-3;
  hp.beta = 0.1;
  hp.gamma = 1e-3;
  hp.lambda = 1.0;
  hp.k_poly = 2;
  hp.train_lr = 1e-2;
  hp.train_epochs = 4;
  return hp;
}

struct Problem {
  TimeSeriesMatrix y;
  Mask psi;
};

Problem small_problem(std::uint64_t seed) {
  const SynthConfig config{8, 16, 0.4, AlphaParams{1.0, 2.0, 0.5}, seed};
  auto [x, l] = gsd(config);
  Mask psi = sample_mask(8, 16, 0.25, derive_seed(seed, 42));
  TimeSeriesMatrix y(psi.known().cwiseProduct(x.values()));
  return {std::move(y), std::move(psi)};
}

}  // namespace

TEST_CASE("forward with one layer composes EMD and GL") {
  const Problem prob = small_problem(1);
  Hyperparams hp = small_hp();
  hp.k_unroll = 1;
  const AlphaParams alpha{1.0, 1.0, 0.2};

  const UnrollState state = forward(prob.y, prob.psi, alpha, hp);

  const GraphLaplacian l1 = covariance_init(prob.y, prob.psi);
  const InpaintResult x1 = emd(prob.y, prob.psi, l1, alpha, hp.lambda, hp.k1);
  const GraphLearnResult l2 =
      gl(prob.y, x1.x_hat, l1, alpha, hp.k2, hp.beta, hp.eta);

  CHECK((state.x_hat.values() - x1.x_hat.values()).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((state.laplacian.matrix() - l2.laplacian.matrix())
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK(state.layer_index == 1);
}

TEST_CASE("forward reproduces fully observed data under tiny lambda") {
  std::mt19937_64 rng(81);
  const int n = 8, m = 14;
  const Matrix x = random_matrix(rng, n, m);
  const Mask psi = Mask::ones(n, m);
  Hyperparams hp = small_hp();
  hp.lambda = 1e-10;
  hp.k1 = 100;
  const UnrollState state =
      forward(TimeSeriesMatrix(x), psi, AlphaParams{1.0, 1.0}, hp);
  CHECK(testutil::relative_error(state.x_hat.values(), x) < 1e-4);
}

TEST_CASE("forward attaches the layer index to solver errors") {
  const Problem prob = small_problem(2);
  Hyperparams hp = small_hp();
  hp.eta = 1e160;  // forces a non-finite GL iterate
  try {
    forward(prob.y, prob.psi, AlphaParams{1.0, 1.0}, hp);
    FAIL("expected a runtime_error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("layer 1") != std::string::npos);
  }
}

TEST_CASE("loss matches the closed form on a zero state") {
  const int n = 6, m = 9;
  std::mt19937_64 rng(82);
  const Matrix x = random_matrix(rng, n, m);
  const Mask psi(testutil::random_known(rng, n, m, 0.7));
  const TimeSeriesMatrix y(psi.known().cwiseProduct(x));
  Hyperparams hp = small_hp();

  const double alpha0 = 1.7;
  const UnrollState state{TimeSeriesMatrix(Matrix::Zero(n, m)),
                          GraphLaplacian::zero(n),
                          AlphaParams{alpha0, 0.0, 0.0}, 0};
  const double got = loss(state, y, psi, hp);
  const double want =
      y.values().squaredNorm() + hp.gamma * alpha0 * alpha0 * m;
  CHECK(got == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("loss gamma term alone equals gamma * M for the identity kernel") {
  const int n = 4, m = 11;
  const TimeSeriesMatrix y(Matrix::Zero(n, m));
  const Mask psi = Mask::ones(n, m);
  Hyperparams hp = small_hp();
  const UnrollState state{TimeSeriesMatrix(Matrix::Zero(n, m)),
                          GraphLaplacian::zero(n), AlphaParams{1.0, 0.0}, 0};
  CHECK(loss(state, y, psi, hp) == doctest::Approx(hp.gamma * m));
}

TEST_CASE("loss equals a term-by-term recomputation") {
  const Problem prob = small_problem(3);
  Hyperparams hp = small_hp();
  const AlphaParams alpha{0.9, 1.1, 0.3};
  const UnrollState state = forward(prob.y, prob.psi, alpha, hp);
  const double got = loss(state, prob.y, prob.psi, hp);

  const double fidelity =
      (prob.y.values() - prob.psi.known().cwiseProduct(state.x_hat.values()))
          .squaredNorm();
  const double variation = graph_variation(state.x_hat, state.laplacian,
                                           alpha);
  const double graph_term = state.laplacian.matrix().squaredNorm();
  const double kernel_term =
      build_kernel(alpha, prob.y.n_timestamps()).matrix().squaredNorm();
  const double want = fidelity + hp.lambda * variation + hp.beta * graph_term +
                      hp.gamma * kernel_term;
  CHECK(got == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("train_alpha with zero epochs returns the initial point") {
  const Problem prob = small_problem(4);
  Hyperparams hp = small_hp();
  hp.train_epochs = 0;
  const AlphaParams alpha0{1.0, 1.0, 1.0};
  const auto [alpha, trace] = train_alpha(prob.y, prob.psi, alpha0, hp);
  CHECK((alpha.coeffs() - alpha0.coeffs()).norm() == 0.0);
  CHECK(trace.loss_per_epoch.empty());
  CHECK(trace.alpha_per_epoch.empty());
}

TEST_CASE("train_alpha keeps coefficients nonnegative and selects the best") {
  const Problem prob = small_problem(5);
  Hyperparams hp = small_hp();
  hp.train_epochs = 5;
  const auto [alpha, trace] =
      train_alpha(prob.y, prob.psi, AlphaParams{1.0, 1.0, 1.0}, hp);

  REQUIRE(trace.loss_per_epoch.size() == 5);
  REQUIRE(trace.alpha_per_epoch.size() == 5);
  REQUIRE(trace.grad_norm_per_epoch.size() == 5);
  double best = trace.loss_per_epoch[0];
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < trace.loss_per_epoch.size(); ++i) {
    CHECK(std::isfinite(trace.loss_per_epoch[i]));
    for (int c = 0; c < trace.alpha_per_epoch[i].size(); ++c) {
      CHECK(trace.alpha_per_epoch[i][c] >= 0.0);
    }
    if (trace.loss_per_epoch[i] < best) {
      best = trace.loss_per_epoch[i];
      best_index = i;
    }
  }
  CHECK((alpha.coeffs() - trace.alpha_per_epoch[best_index].coeffs()).norm() ==
        0.0);
}

TEST_CASE("train_alpha is deterministic") {
  const Problem prob = small_problem(6);
  Hyperparams hp = small_hp();
  hp.train_epochs = 3;
  const auto [a1, t1] =
      train_alpha(prob.y, prob.psi, AlphaParams{1.0, 0.5, 0.5}, hp);
  const auto [a2, t2] =
      train_alpha(prob.y, prob.psi, AlphaParams{1.0, 0.5, 0.5}, hp);
  CHECK((a1.coeffs() - a2.coeffs()).norm() == 0.0);
  REQUIRE(t1.loss_per_epoch.size() == t2.loss_per_epoch.size());
  for (std::size_t i = 0; i < t1.loss_per_epoch.size(); ++i) {
    CHECK(t1.loss_per_epoch[i] == t2.loss_per_epoch[i]);
    CHECK(t1.grad_norm_per_epoch[i] == t2.grad_norm_per_epoch[i]);
  }
}

TEST_CASE("train_alpha stays put when the loss is already flat") {
  // Fully observed data with negligible regularization: the loss barely
  // depends on alpha, so training should return (a projection of) the
  // start point.
  std::mt19937_64 rng(83);
  const int n = 6, m = 10;
  const Matrix x = random_matrix(rng, n, m);
  const Mask psi = Mask::ones(n, m);
  Hyperparams hp = small_hp();
  hp.lambda = 1e-12;
  hp.gamma = 1e-14;
  hp.beta = 1e-12;  // the learned graph's norm must not steer the loss
  hp.eta = 1e-8;
  hp.train_epochs = 3;
  const AlphaParams alpha0{1.0, 1.0};
  const auto [alpha, trace] =
      train_alpha(TimeSeriesMatrix(x), psi, alpha0, hp);
  CHECK(testutil::relative_error(Matrix(alpha.coeffs()),
                                 Matrix(alpha0.coeffs())) < 1e-6);
}

TEST_CASE("finite differences match the analytic kernel-term gradient") {
  // d/d_alpha_i of gamma ||Z(alpha)||_F^2 is 2 gamma <Z, (DD^T)^i>.
  const int m = 12;
  const double gamma = 1e-3;
  const Vector alpha = (Vector(3) << 1.0, 4.0, 1.66).finished();
  auto term = [&](const Vector& a) {
    return gamma *
           build_kernel(AlphaParams{Vector(a)}, m).matrix().squaredNorm();
  };
  const Matrix z = build_kernel(AlphaParams{Vector(alpha)}, m).matrix();
  for (int i = 0; i < 3; ++i) {
    const double h = 1e-3 * std::max(1.0, std::abs(alpha[i]));
    Vector up = alpha, down = alpha;
    up[i] += h;
    down[i] -= h;
    const double fd = (term(up) - term(down)) / (2.0 * h);
    const Matrix power = i == 0 ? Matrix(Matrix::Identity(m, m))
                                : Matrix(delta_delta_t_power(m, i));
    const double analytic = 2.0 * gamma * z.cwiseProduct(power).sum();
    CHECK(fd == doctest::Approx(analytic).epsilon(1e-4));
  }
}

TEST_CASE("forward with the generating kernel beats the identity kernel") {
  // Scaled-down paired experiment: same data and masks, two kernels.
  const AlphaParams truth{1.0, 4.0, 1.66};
  const SynthConfig config{20, 100, 0.3, truth, 11};
  const auto [x, l_true] = gsd(config);
  Hyperparams hp;
  hp.k_unroll = 3;
  hp.k1 = 30;
  hp.k2 = 10;
  hp.train_epochs = 0;

  double err_truth = 0.0, err_identity = 0.0;
  const int masks = 10;
  for (int k = 0; k < masks; ++k) {
    const Mask psi = sample_mask(20, 100, 0.3, derive_seed(500, k));
    const TimeSeriesMatrix y(psi.known().cwiseProduct(x.values()));
    const UnrollState with_truth = forward(y, psi, truth, hp);
    const UnrollState with_identity =
        forward(y, psi, AlphaParams{1.0, 0.0, 0.0}, hp);
    err_truth += normalized_error(x, with_truth.x_hat, psi);
    err_identity += normalized_error(x, with_identity.x_hat, psi);
  }
  CHECK(err_truth / masks < err_identity / masks);
}
