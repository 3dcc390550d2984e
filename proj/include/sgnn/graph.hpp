#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sgnn/matrix.hpp"
#include "sgnn/node_mask.hpp"
#include "sgnn/sparse.hpp"

namespace sgnn {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

struct NodeSplit {
  NodeMask train;
  NodeMask val;
  NodeMask test;
};

class Graph;

struct BuildReport;

// Symmetrizes, deduplicates and drops self-loops from `edges`, then validates
// everything. Throws ValidationError naming the offending node.
BuildReport build_graph(std::size_t num_nodes, std::size_t num_classes,
                        std::span<const Edge> edges, Matrix features,
                        std::vector<std::int32_t> labels, NodeSplit split);

// Immutable undirected citation graph. Adjacency is stored in both directions
// in compressed-row form, without self-loops; neighbors are sorted.
class Graph {
 public:
  Graph() = default;

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  std::size_t feature_dim() const noexcept { return features_.cols(); }
  // Undirected edge count.
  std::size_t num_edges() const noexcept { return col_idx_.size() / 2; }

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::uint32_t> col_idx() const noexcept { return col_idx_; }
  std::span<const std::uint32_t> neighbors(std::size_t v) const {
    return {col_idx_.data() + row_ptr_[v], row_ptr_[v + 1] - row_ptr_[v]};
  }
  std::size_t degree(std::size_t v) const { return row_ptr_[v + 1] - row_ptr_[v]; }
  bool has_edge(std::uint32_t u, std::uint32_t v) const;

  // Undirected edges as (u, v) with u < v, sorted.
  std::vector<Edge> edges() const;

  const Matrix& features() const noexcept { return features_; }
  std::span<const std::int32_t> labels() const noexcept { return labels_; }
  const NodeMask& train_mask() const noexcept { return split_.train; }
  const NodeMask& val_mask() const noexcept { return split_.val; }
  const NodeMask& test_mask() const noexcept { return split_.test; }
  const NodeSplit& split() const noexcept { return split_; }

 private:
  friend BuildReport build_graph(std::size_t, std::size_t, std::span<const Edge>, Matrix,
                                 std::vector<std::int32_t>, NodeSplit);

  std::size_t num_nodes_ = 0;
  std::size_t num_classes_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_idx_;
  Matrix features_;
  std::vector<std::int32_t> labels_;
  NodeSplit split_;
};

struct BuildReport {
  Graph graph;
  std::size_t self_loops_dropped = 0;
  // Input pairs that collapsed onto an already-seen undirected edge,
  // including the reverse direction of a symmetric input.
  std::size_t duplicates_dropped = 0;
};

// D^{-1/2} (A + I) D^{-1/2} with D the degree matrix of A + I.
struct NormalizedAdjacency {
  CsrMatrix matrix;
  // deg(v) + 1 for each node
  std::vector<double> self_degree;
};

NormalizedAdjacency normalize(const Graph& g);

// Induced subgraph on the active nodes of `mask`. Node ids are not remapped.
// Edge materialization is lazy and cached; a view is not safe to share
// across threads before edges() has been called once.
class SubgraphView {
 public:
  SubgraphView(const Graph& parent, NodeMask mask);

  const Graph& parent() const noexcept { return *parent_; }
  const NodeMask& mask() const noexcept { return mask_; }
  const std::vector<Edge>& edges() const&;
  // The edges live inside the view; don't hand them out from a temporary.
  const std::vector<Edge>& edges() const&& = delete;
  std::size_t num_edges() const { return edges().size(); }

 private:
  const Graph* parent_;
  NodeMask mask_;
  mutable std::optional<std::vector<Edge>> edges_;
};

SubgraphView induce(const Graph& g, NodeMask mask);

// Masked propagation: rows and columns of inactive nodes (self-loop included)
// contribute nothing; active entries keep their full-graph normalization.
Matrix spmm(const NormalizedAdjacency& adj, const Matrix& x);
Matrix spmm(const NormalizedAdjacency& adj, const SubgraphView& view, const Matrix& x);

// The operator spmm(adj, view, .) applies, materialized with inactive
// entries removed.
CsrMatrix masked_operator(const NormalizedAdjacency& adj, const NodeMask& mask);
// Normalization recomputed from degrees inside the induced subgraph; inactive
// nodes get empty rows.
CsrMatrix renormalized_operator(const Graph& g, const NodeMask& mask);
// Normalization of the graph restricted to the kept undirected edges, all
// self-loops retained. `keep` is indexed like Graph::edges().
CsrMatrix edge_subset_operator(const Graph& g, std::span<const std::uint8_t> keep);

}  // namespace sgnn
