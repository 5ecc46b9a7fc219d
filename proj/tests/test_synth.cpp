#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "jigl/metrics.hpp"
#include "jigl/rng.hpp"
#include "jigl/synth.hpp"
#include "test_util.hpp"

using namespace jigl;

namespace {

bool reachable_everywhere(const Matrix& laplacian) {
  const int n = static_cast<int>(laplacian.rows());
  std::vector<int> stack{0};
  std::vector<char> seen(n, 0);
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < n; ++v) {
      if (u != v && laplacian(u, v) < 0.0 && !seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == n;
}

}  // namespace

TEST_CASE("er_graph produces valid connected Laplacians") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const GraphLaplacian l = er_graph(8, 0.4, seed);
    CHECK(validate_laplacian(l.matrix()).ok);
    CHECK(reachable_everywhere(l.matrix()));
  }
}

TEST_CASE("er_graph edge counts follow the binomial mean") {
  const int n = 20;
  const double p = 0.3;
  const double pairs = n * (n - 1) / 2.0;
  double total_edges = 0.0;
  const int samples = 1000;
  for (int seed = 0; seed < samples; ++seed) {
    const GraphLaplacian l = er_graph(n, p, 40000 + seed);
    total_edges += l.matrix().trace() / 2.0;  // sum of degrees / 2
  }
  const double mean = total_edges / samples;
  const double sigma_mean =
      std::sqrt(pairs * p * (1 - p)) / std::sqrt(static_cast<double>(samples));
  // Connectivity resampling biases the mean upward slightly; 3 sigma still
  // covers it comfortably at n = 20.
  CHECK(std::abs(mean - pairs * p) <= 3.0 * sigma_mean + 0.2);
}

TEST_CASE("er_graph at p near 1 yields the complete graph") {
  const GraphLaplacian l = er_graph(5, 0.999, 7);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      if (i != j) CHECK(l.matrix()(i, j) == -1.0);
    }
  }
}

TEST_CASE("er_graph rejects bad parameters") {
  CHECK_THROWS_AS(er_graph(1, 0.5, 0), std::invalid_argument);
  CHECK_THROWS_AS(er_graph(5, 0.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(er_graph(5, 1.0, 0), std::invalid_argument);
}

TEST_CASE("gsd column covariance approaches pinv(L) for the identity kernel") {
  const GraphLaplacian l = er_graph(6, 0.5, 31);
  const int m = 100;
  Matrix accum = Matrix::Zero(6, 6);
  const int draws = 100;  // 10^4 column samples in total
  for (int k = 0; k < draws; ++k) {
    const TimeSeriesMatrix x =
        gsd_on_graph(l, AlphaParams{1.0}, m, derive_seed(9000, k));
    accum += x.values() * x.values().transpose();
  }
  const Matrix empirical = accum / static_cast<double>(draws * m);
  const Matrix want =
      Eigen::CompleteOrthogonalDecomposition<Matrix>(l.matrix())
          .pseudoInverse();
  CHECK(testutil::relative_error(empirical, want) < 0.1);
}

TEST_CASE("gsd columns carry no constant component") {
  const SynthConfig config{10, 40, 0.4, AlphaParams{1.0, 4.0, 1.66}, 77};
  const auto [x, l] = gsd(config);
  for (int t = 0; t < x.n_timestamps(); ++t) {
    CHECK(std::abs(x.values().col(t).sum()) < 1e-8);
  }
  CHECK(x.values().allFinite());
  CHECK(x.n_vertices() == 10);
  CHECK(x.n_timestamps() == 40);
}

TEST_CASE("gsd returns the Laplacian it generated from") {
  const SynthConfig config{8, 30, 0.4, AlphaParams{1.0, 2.0}, 123};
  const auto [x, l] = gsd(config);
  const GraphLaplacian regenerated =
      er_graph(8, 0.4, derive_seed(config.seed, 0));
  CHECK((l.matrix() - regenerated.matrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gsd data is smoother on the true graph than on a permuted one") {
  const SynthConfig config{20, 500, 0.3, AlphaParams{1.0, 4.0, 1.66}, 5};
  const auto [x, l] = gsd(config);
  const double true_variation = graph_variation(x, l, config.alpha_true);

  std::mt19937_64 rng(6);
  std::vector<int> perm(20);
  for (int i = 0; i < 20; ++i) perm[i] = i;
  for (int i = 19; i > 0; --i) {
    std::swap(perm[i], perm[rng() % (i + 1)]);
  }
  Matrix shuffled(20, 500);
  for (int i = 0; i < 20; ++i) shuffled.row(perm[i]) = x.values().row(i);
  const double permuted_variation =
      graph_variation(TimeSeriesMatrix(shuffled), l, config.alpha_true);
  CHECK(true_variation < permuted_variation);
}

TEST_CASE("sample_mask hits the exact zero count") {
  CHECK(sample_mask(5, 8, 0.0, 1).n_missing() == 0);
  CHECK(sample_mask(20, 500, 0.5, 2).n_missing() == 5000);
  const Mask m = sample_mask(6, 10, 0.37, 3);
  CHECK(m.n_missing() == std::lround(0.37 * 60));
}

TEST_CASE("sample_mask keeps two observations per row") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Mask m = sample_mask(5, 5, 0.5, seed);
    for (int i = 0; i < 5; ++i) {
      CHECK(m.known().row(i).sum() >= 2.0);
    }
  }
}

TEST_CASE("sample_mask rejects infeasible fractions") {
  CHECK_THROWS_AS(sample_mask(2, 4, 0.9, 1), std::runtime_error);
  CHECK_THROWS_AS(sample_mask(2, 4, 1.0, 1), std::invalid_argument);
}

TEST_CASE("sample_mask seeds give distinct masks") {
  std::set<std::vector<double>> seen;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Mask m = sample_mask(20, 500, 0.3, seed);
    std::vector<double> flat(m.known().data(),
                             m.known().data() + m.known().size());
    seen.insert(std::move(flat));
  }
  CHECK(seen.size() == 100);
}

TEST_CASE("add_noise respects the requested SNR") {
  std::mt19937_64 rng(91);
  const Matrix x = testutil::random_matrix(rng, 20, 500);
  const TimeSeriesMatrix clean(x);

  const TimeSeriesMatrix nearly = add_noise(clean, 1e6, 5);
  CHECK(testutil::relative_error(nearly.values(), x) < 1e-4);

  const TimeSeriesMatrix noisy = add_noise(clean, 0.0, 6);
  const double noise_power = (noisy.values() - x).squaredNorm();
  CHECK(noise_power ==
        doctest::Approx(x.squaredNorm()).epsilon(0.05));  // 0 dB

  const TimeSeriesMatrix again = add_noise(clean, 0.0, 6);
  CHECK((again.values() - noisy.values()).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(add_noise(TimeSeriesMatrix(Matrix::Zero(3, 4)), 10.0, 1),
                  std::invalid_argument);
}
