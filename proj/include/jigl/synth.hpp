#pragma once

#include <cstdint>
#include <utility>

#include "jigl/core.hpp"

namespace jigl {

struct SynthConfig {
  int n_vertices = 20;
  int n_timestamps = 500;
  double edge_prob = 0.3;
  AlphaParams alpha_true{1.0, 4.0, 1.66};
  std::uint64_t seed = 1;

  void validate() const;
};

// Unweighted Erdos-Renyi graph, resampled (up to 100 tries) until
// connected.
GraphLaplacian er_graph(int n, double p, std::uint64_t seed);

// Graph-smooth, temporally coloured data on a given graph: columns of
// U Y with Y ~ N(0, pinv(Sigma)) drawn in the Laplacian eigenbasis, then
// right-multiplied by pinv(Z(alpha))^{1/2}.
TimeSeriesMatrix gsd_on_graph(const GraphLaplacian& laplacian,
                              const AlphaParams& alpha_true, int m,
                              std::uint64_t seed);

// Full synthetic draw: graph plus data, both from config.seed.
std::pair<TimeSeriesMatrix, GraphLaplacian> gsd(const SynthConfig& config);

// Uniform mask with exactly round(missing_fraction * n * m) zeros, rejected
// and resampled until every vertex row keeps at least two observed entries.
Mask sample_mask(int n, int m, double missing_fraction, std::uint64_t seed);

// Adds i.i.d. Gaussian noise scaled so the expected SNR (in dB) matches
// snr_db.
TimeSeriesMatrix add_noise(const TimeSeriesMatrix& x, double snr_db,
                           std::uint64_t seed);

}  // namespace jigl
