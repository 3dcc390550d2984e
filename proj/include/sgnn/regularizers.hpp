#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgnn/graph.hpp"
#include "sgnn/matrix.hpp"
#include "sgnn/node_mask.hpp"
#include "sgnn/poisson_clock.hpp"
#include "sgnn/rng.hpp"
#include "sgnn/sparse.hpp"

namespace sgnn {

enum class RegKind { none, dropout, drop_edge, drop_node, sgnn };

std::string_view to_string(RegKind kind);
RegKind parse_reg_kind(std::string_view name);
std::string_view to_string(RateMode mode);
RateMode parse_rate_mode(std::string_view name);

struct RegularizerConfig {
  RegKind kind = RegKind::none;
  // Drop probability for dropout / drop_edge / drop_node.
  double p = 0.5;
  // Clock rate and cutoff for sgnn.
  double lambda = 1.0;
  double t_cut = 0.7;
  RateMode rate_mode = RateMode::uniform;
  // Recompute degrees inside the induced subgraph for node-dropping schemes.
  bool renormalize_subgraph = false;

  void validate() const;  // throws ConfigError
};

// Everything one training epoch needs to perturb the input. Absent masks
// mean "no perturbation of that kind".
struct StochasticPlan {
  std::size_t epoch = 0;
  // Inverted-dropout masks: entries are 0 or 1/(1-p).
  std::optional<Matrix> feature_mask;
  std::optional<Matrix> hidden_mask;
  // One entry per undirected edge, in Graph::edges() order.
  std::optional<std::vector<std::uint8_t>> edge_keep;
  std::optional<NodeMask> node_mask;

  bool is_identity() const {
    return !feature_mask && !hidden_mask && !edge_keep && !node_mask;
  }
  // Fraction of nodes kept by the plan (1 when nodes are untouched).
  double active_fraction() const { return node_mask ? node_mask->fraction() : 1.0; }
};

// Draws one epoch's plan. `hidden_dim` sizes the hidden-layer dropout mask.
// sgnn: T_v ~ Exp(lambda_v) drawn fresh per node in node order, active iff
// T_v <= t_cut; surviving activations are not rescaled.
StochasticPlan plan_epoch(const RegularizerConfig& cfg, const Graph& g, std::size_t hidden_dim,
                          std::size_t epoch, Rng& rng);

struct EffectiveInput {
  CsrMatrix op;
  Matrix features;
  std::optional<Matrix> hidden_mask;
  // Nodes that still take part in propagation and the loss.
  std::optional<NodeMask> active;
};

// Builds the operator and features a forward pass should see under `plan`.
EffectiveInput apply(const StochasticPlan& plan, const Graph& g, const NormalizedAdjacency& adj,
                     const Matrix& x, bool renormalize_subgraph = false);

}  // namespace sgnn
