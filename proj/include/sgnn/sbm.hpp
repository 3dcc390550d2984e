#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "sgnn/dataset.hpp"

namespace sgnn {

// Planted-partition stochastic block model with class = block id.
struct SbmConfig {
  std::size_t blocks = 3;
  std::size_t nodes_per_block = 100;
  double p_intra = 0.1;
  double p_inter = 0.005;
  std::size_t feature_dim = 16;
  // Std-dev of the Gaussian noise added to the one-hot block centroid.
  double noise = 1.0;
  std::size_t train_per_class = 20;
  std::size_t val_count = 100;
  std::uint64_t seed = 1;

  std::size_t num_nodes() const noexcept { return blocks * nodes_per_block; }
  void validate() const;  // throws ConfigError
};

// "sbm:3x100" or "sbm:3x100,p_in=0.1,p_out=0.005,dim=16,noise=1,train=20,val=100".
// val defaults to min(500, nodes / 3).
SbmConfig parse_sbm_spec(std::string_view spec, std::uint64_t seed);

// Expected undirected edge count and its binomial variance.
double sbm_expected_edges(const SbmConfig& cfg);
double sbm_edge_variance(const SbmConfig& cfg);

DatasetBundle generate_sbm(const SbmConfig& cfg);

}  // namespace sgnn
