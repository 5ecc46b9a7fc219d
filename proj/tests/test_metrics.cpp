#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "jigl/metrics.hpp"
#include "test_util.hpp"

using namespace jigl;

TEST_CASE("normalized_error follows the printed formula") {
  Matrix x = Matrix::Zero(2, 3);
  Matrix x_hat = Matrix::Zero(2, 3);
  Matrix known = Matrix::Ones(2, 3);

  // Exact reconstruction.
  known(0, 0) = 0.0;
  CHECK(normalized_error(TimeSeriesMatrix(x), TimeSeriesMatrix(x_hat),
                         Mask(known)) == 0.0);

  // Single missing entry with error 2 -> 2 / 1.
  x_hat(0, 0) = 2.0;
  CHECK(normalized_error(TimeSeriesMatrix(x), TimeSeriesMatrix(x_hat),
                         Mask(known)) == doctest::Approx(2.0));

  // Two missing entries, errors 3 and 4 -> 5 / 2.
  known(1, 2) = 0.0;
  x_hat(0, 0) = 3.0;
  x_hat(1, 2) = 4.0;
  CHECK(normalized_error(TimeSeriesMatrix(x), TimeSeriesMatrix(x_hat),
                         Mask(known)) == doctest::Approx(2.5));

  // Frobenius numerator over a count denominator is not an RMSE; the
  // companion metric is.
  CHECK(missing_rmse(TimeSeriesMatrix(x), TimeSeriesMatrix(x_hat),
                     Mask(known)) == doctest::Approx(5.0 / std::sqrt(2.0)));

  CHECK_THROWS_AS(normalized_error(TimeSeriesMatrix(x), TimeSeriesMatrix(x_hat),
                                   Mask::ones(2, 3)),
                  std::invalid_argument);
}

TEST_CASE("normalized_error scales linearly with the residual") {
  std::mt19937_64 rng(71);
  const Matrix x = testutil::random_matrix(rng, 5, 8);
  const Matrix e = testutil::random_matrix(rng, 5, 8);
  Matrix known = testutil::random_known(rng, 5, 8, 0.6);
  known(0, 0) = 0.0;  // guarantee a missing entry
  const Mask psi(known);
  const double base = normalized_error(TimeSeriesMatrix(x),
                                       TimeSeriesMatrix(x + e), psi);
  const double scaled = normalized_error(TimeSeriesMatrix(x),
                                         TimeSeriesMatrix(x + 3.0 * e), psi);
  CHECK(scaled == doctest::Approx(3.0 * base).epsilon(1e-12));
}

TEST_CASE("binarize keeps edges above the relative threshold") {
  Matrix w = Matrix::Zero(3, 3);
  w(0, 1) = w(1, 0) = 1.0;
  w(1, 2) = w(2, 1) = 0.05;
  const GraphLaplacian l = GraphLaplacian::from_weights(w);

  const EdgeSet strong = binarize(l, 0.1);
  CHECK(strong.size() == 1);
  CHECK(strong.edges().count({0, 1}) == 1);

  // Unweighted graphs binarize to their exact edge set.
  Matrix uw = Matrix::Zero(3, 3);
  uw(0, 1) = uw(1, 0) = 1.0;
  uw(0, 2) = uw(2, 0) = 1.0;
  const EdgeSet exact = binarize(GraphLaplacian::from_weights(uw), 0.1);
  CHECK(exact.size() == 2);

  CHECK(binarize(GraphLaplacian::zero(4), 0.1).size() == 0);

  // Relative thresholding is scale invariant.
  const GraphLaplacian scaled = GraphLaplacian::from_weights(100.0 * w);
  CHECK(binarize(scaled, 0.1).edges() == binarize(l, 0.1).edges());
}

TEST_CASE("f_score counts matched edges") {
  const EdgeSet truth(4, {{0, 1}, {0, 2}});
  const EdgeSet learned(4, {{0, 1}, {1, 2}});
  CHECK(f_score(learned, truth) == doctest::Approx(0.5));  // P = R = 0.5
  CHECK(f_score(truth, truth) == 1.0);
  CHECK(f_score(EdgeSet(4, {{2, 3}}), truth) == 0.0);
  CHECK(f_score(EdgeSet(4, {}), EdgeSet(4, {})) == 1.0);
  CHECK(f_score(EdgeSet(4, {}), truth) == 0.0);
  CHECK(f_score(learned, truth) == f_score(truth, learned));
  CHECK_THROWS_AS(f_score(EdgeSet(3, {}), EdgeSet(4, {})),
                  std::invalid_argument);
}

TEST_CASE("EdgeSet rejects malformed edges") {
  CHECK_THROWS_AS(EdgeSet(3, {{1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(EdgeSet(3, {{2, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(EdgeSet(3, {{0, 3}}), std::invalid_argument);
}

TEST_CASE("sensing_ratio is the missing fraction") {
  CHECK(sensing_ratio(Mask::ones(4, 5)) == 0.0);
  CHECK(sensing_ratio(Mask(Matrix::Zero(4, 5))) == 1.0);
  Matrix known = Matrix::Ones(20, 500);
  int zeros = 0;
  for (int j = 0; j < 500 && zeros < 5000; ++j) {
    for (int i = 0; i < 20 && zeros < 5000; ++i) {
      known(i, j) = 0.0;
      ++zeros;
    }
  }
  CHECK(sensing_ratio(Mask(known)) == doctest::Approx(0.5));
}

TEST_CASE("stability_score averages pairwise f-scores") {
  Matrix w1 = Matrix::Zero(4, 4);
  w1(0, 1) = w1(1, 0) = 1.0;
  Matrix w2 = Matrix::Zero(4, 4);
  w2(2, 3) = w2(3, 2) = 1.0;
  const GraphLaplacian a = GraphLaplacian::from_weights(w1);
  const GraphLaplacian b = GraphLaplacian::from_weights(w2);

  CHECK(stability_score({a, a, a}, 0.1) == 1.0);
  CHECK(stability_score({a, b}, 0.1) == 0.0);

  // Pairwise scores {1, 0.5, 0.5} -> mean 2/3.
  Matrix w3 = Matrix::Zero(4, 4);
  w3(0, 1) = w3(1, 0) = 1.0;
  w3(1, 2) = w3(2, 1) = 1.0;
  Matrix w4 = Matrix::Zero(4, 4);
  w4(0, 1) = w4(1, 0) = 1.0;
  w4(0, 2) = w4(2, 0) = 1.0;
  const GraphLaplacian g1 = GraphLaplacian::from_weights(w3);
  const GraphLaplacian g3 = GraphLaplacian::from_weights(w4);
  CHECK(stability_score({g1, g1, g3}, 0.1) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  CHECK_THROWS_AS(stability_score({a}, 0.1), std::invalid_argument);
}
