#include "sgnn/regularizers.hpp"

#include <cmath>

#include "sgnn/errors.hpp"

namespace sgnn {

std::string_view to_string(RegKind kind) {
  switch (kind) {
    case RegKind::none: return "none";
    case RegKind::dropout: return "dropout";
    case RegKind::drop_edge: return "drop_edge";
    case RegKind::drop_node: return "drop_node";
    case RegKind::sgnn: return "sgnn";
  }
  return "none";
}

RegKind parse_reg_kind(std::string_view name) {
  if (name == "none") return RegKind::none;
  if (name == "dropout") return RegKind::dropout;
  if (name == "drop_edge" || name == "dropedge") return RegKind::drop_edge;
  if (name == "drop_node" || name == "dropnode") return RegKind::drop_node;
  if (name == "sgnn") return RegKind::sgnn;
  throw ConfigError("unknown regularizer '" + std::string(name) + "'");
}

std::string_view to_string(RateMode mode) {
  return mode == RateMode::degree ? "degree" : "uniform";
}

RateMode parse_rate_mode(std::string_view name) {
  if (name == "uniform") return RateMode::uniform;
  if (name == "degree") return RateMode::degree;
  throw ConfigError("unknown rate mode '" + std::string(name) + "'");
}

void RegularizerConfig::validate() const {
  switch (kind) {
    case RegKind::none:
      break;
    case RegKind::dropout:
    case RegKind::drop_edge:
    case RegKind::drop_node:
      if (!(p >= 0.0 && p < 1.0)) throw ConfigError("reg.p must lie in [0, 1)");
      break;
    case RegKind::sgnn:
      if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("reg.lambda must be > 0");
      if (!(t_cut > 0.0) || !std::isfinite(t_cut)) throw ConfigError("reg.t_cut must be > 0");
      break;
  }
}

namespace {

Matrix inverted_dropout_mask(std::size_t rows, std::size_t cols, double p, Rng& rng) {
  Matrix mask(rows, cols);
  const double scale = 1.0 / (1.0 - p);
  for (double& m : mask.values()) m = rng.bernoulli(p) ? 0.0 : scale;
  return mask;
}

}  // namespace

StochasticPlan plan_epoch(const RegularizerConfig& cfg, const Graph& g, std::size_t hidden_dim,
                          std::size_t epoch, Rng& rng) {
  cfg.validate();
  StochasticPlan plan;
  plan.epoch = epoch;
  const std::size_t n = g.num_nodes();
  switch (cfg.kind) {
    case RegKind::none:
      break;
    case RegKind::dropout:
      if (cfg.p > 0.0) {
        plan.feature_mask = inverted_dropout_mask(n, g.feature_dim(), cfg.p, rng);
        plan.hidden_mask = inverted_dropout_mask(n, hidden_dim, cfg.p, rng);
      }
      break;
    case RegKind::drop_edge:
      if (cfg.p > 0.0) {
        std::vector<std::uint8_t> keep(g.num_edges());
        for (auto& k : keep) k = rng.bernoulli(cfg.p) ? 0 : 1;
        plan.edge_keep = std::move(keep);
      }
      break;
    case RegKind::drop_node:
      if (cfg.p > 0.0) {
        NodeMask mask(n);
        for (std::size_t v = 0; v < n; ++v) mask.set(v, !rng.bernoulli(cfg.p));
        plan.node_mask = std::move(mask);
      }
      break;
    case RegKind::sgnn: {
      const auto rates = node_rates(g, cfg.lambda, cfg.rate_mode);
      NodeMask mask(n);
      for (std::size_t v = 0; v < n; ++v)
        mask.set(v, sample_exponential(rates[v], rng) <= cfg.t_cut);
      plan.node_mask = std::move(mask);
      break;
    }
  }
  return plan;
}

EffectiveInput apply(const StochasticPlan& plan, const Graph& g, const NormalizedAdjacency& adj,
                     const Matrix& x, bool renormalize_subgraph) {
  const std::size_t n = g.num_nodes();
  if (adj.matrix.rows != n || x.rows() != n)
    throw ShapeError("apply: operator/features do not match the graph");

  EffectiveInput out;
  if (plan.node_mask) {
    if (plan.node_mask->size() != n) throw ShapeError("apply: node mask size != node count");
    out.op = renormalize_subgraph ? renormalized_operator(g, *plan.node_mask)
                                  : masked_operator(adj, *plan.node_mask);
    out.active = plan.node_mask;
  } else if (plan.edge_keep) {
    out.op = edge_subset_operator(g, *plan.edge_keep);
  } else {
    out.op = adj.matrix;
  }

  out.features = x;
  if (plan.feature_mask) {
    if (!plan.feature_mask->same_shape(x)) throw ShapeError("apply: feature mask shape");
    auto dst = out.features.values();
    const auto m = plan.feature_mask->values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] *= m[i];
  }
  out.hidden_mask = plan.hidden_mask;
  return out;
}

}  // namespace sgnn
