#include "sgnn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgnn/errors.hpp"

namespace sgnn {

namespace {

void check_mask_size(const NodeMask& mask, std::size_t n, const char* name) {
  if (mask.size() != n)
    throw ValidationError(ValidationKind::mask_size_mismatch, -1,
                          std::string(name) + " mask has " + std::to_string(mask.size()) +
                              " entries, graph has " + std::to_string(n) + " nodes");
}

// Shared by every normalization variant: entries of (A + I) restricted to
// `active` nodes and `edge_ok` adjacency slots, scaled by 1/sqrt(d_u d_v).
template <typename EdgeFilter>
CsrMatrix normalized_csr(const Graph& g, const NodeMask* active, EdgeFilter edge_ok) {
  const std::size_t n = g.num_nodes();
  const auto row_ptr = g.row_ptr();
  const auto col_idx = g.col_idx();
  auto is_active = [&](std::size_t v) { return active == nullptr || (*active)[v]; };

  std::vector<double> deg(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    if (!is_active(u)) continue;
    double d = 1.0;
    for (std::size_t k = row_ptr[u]; k < row_ptr[u + 1]; ++k)
      if (is_active(col_idx[k]) && edge_ok(k)) d += 1.0;
    deg[u] = d;
  }

  CsrMatrix m;
  m.rows = m.cols = n;
  m.row_ptr.assign(1, 0);
  m.row_ptr.reserve(n + 1);
  m.col.reserve(col_idx.size() + n);
  m.val.reserve(col_idx.size() + n);
  for (std::size_t u = 0; u < n; ++u) {
    if (is_active(u)) {
      bool diagonal_done = false;
      auto emit_diagonal = [&] {
        m.col.push_back(static_cast<std::uint32_t>(u));
        m.val.push_back(1.0 / deg[u]);
        diagonal_done = true;
      };
      for (std::size_t k = row_ptr[u]; k < row_ptr[u + 1]; ++k) {
        const std::uint32_t v = col_idx[k];
        if (!diagonal_done && v > u) emit_diagonal();
        if (!is_active(v) || !edge_ok(k)) continue;
        m.col.push_back(v);
        m.val.push_back(1.0 / std::sqrt(deg[u] * deg[v]));
      }
      if (!diagonal_done) emit_diagonal();
    }
    m.row_ptr.push_back(m.col.size());
  }
  return m;
}

}  // namespace

BuildReport build_graph(std::size_t num_nodes, std::size_t num_classes,
                        std::span<const Edge> edges, Matrix features,
                        std::vector<std::int32_t> labels, NodeSplit split) {
  if (features.rows() != num_nodes)
    throw ValidationError(ValidationKind::feature_rows_mismatch, -1,
                          "feature matrix has " + std::to_string(features.rows()) +
                              " rows, expected " + std::to_string(num_nodes));
  if (labels.size() != num_nodes)
    throw ValidationError(ValidationKind::label_count_mismatch, -1,
                          "got " + std::to_string(labels.size()) + " labels for " +
                              std::to_string(num_nodes) + " nodes");
  for (std::size_t v = 0; v < num_nodes; ++v) {
    if (labels[v] < 0 || static_cast<std::size_t>(labels[v]) >= num_classes)
      throw ValidationError(ValidationKind::label_out_of_range, static_cast<std::int64_t>(v),
                            "node " + std::to_string(v) + " has label " +
                                std::to_string(labels[v]) + " outside [0, " +
                                std::to_string(num_classes) + ")");
  }
  check_mask_size(split.train, num_nodes, "train");
  check_mask_size(split.val, num_nodes, "val");
  check_mask_size(split.test, num_nodes, "test");
  for (std::size_t v = 0; v < num_nodes; ++v) {
    const int hits = int(split.train[v]) + int(split.val[v]) + int(split.test[v]);
    if (hits > 1)
      throw ValidationError(ValidationKind::mask_overlap, static_cast<std::int64_t>(v),
                            "node " + std::to_string(v) + " belongs to more than one split");
  }

  BuildReport report;
  std::vector<Edge> directed;
  directed.reserve(edges.size() * 2);
  for (const auto& [u, v] : edges) {
    for (auto node : {u, v}) {
      if (node >= num_nodes)
        throw ValidationError(ValidationKind::node_out_of_range, node,
                              "edge endpoint " + std::to_string(node) + " out of range [0, " +
                                  std::to_string(num_nodes) + ")");
    }
    if (u == v) {
      ++report.self_loops_dropped;
      continue;
    }
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  const auto unique_end = std::unique(directed.begin(), directed.end());
  report.duplicates_dropped = static_cast<std::size_t>(directed.end() - unique_end) / 2;
  directed.erase(unique_end, directed.end());

  Graph& g = report.graph;
  g.num_nodes_ = num_nodes;
  g.num_classes_ = num_classes;
  g.row_ptr_.assign(num_nodes + 1, 0);
  for (const auto& e : directed) ++g.row_ptr_[e.first + 1];
  for (std::size_t v = 0; v < num_nodes; ++v) g.row_ptr_[v + 1] += g.row_ptr_[v];
  g.col_idx_.reserve(directed.size());
  for (const auto& e : directed) g.col_idx_.push_back(e.second);
  g.features_ = std::move(features);
  g.labels_ = std::move(labels);
  g.split_ = std::move(split);
  return report;
}

bool Graph::has_edge(std::uint32_t u, std::uint32_t v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (std::uint32_t u = 0; u < num_nodes_; ++u)
    for (auto v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

NormalizedAdjacency normalize(const Graph& g) {
  NormalizedAdjacency adj;
  adj.matrix = normalized_csr(g, nullptr, [](std::size_t) { return true; });
  adj.self_degree.resize(g.num_nodes());
  for (std::size_t v = 0; v < g.num_nodes(); ++v)
    adj.self_degree[v] = static_cast<double>(g.degree(v)) + 1.0;
  return adj;
}

SubgraphView::SubgraphView(const Graph& parent, NodeMask mask)
    : parent_(&parent), mask_(std::move(mask)) {
  if (mask_.size() != parent.num_nodes())
    throw ShapeError("induce: mask has " + std::to_string(mask_.size()) +
                     " entries, graph has " + std::to_string(parent.num_nodes()) + " nodes");
}

const std::vector<Edge>& SubgraphView::edges() const& {
  if (!edges_) {
    std::vector<Edge> out;
    for (std::uint32_t u = 0; u < parent_->num_nodes(); ++u) {
      if (!mask_[u]) continue;
      for (auto v : parent_->neighbors(u))
        if (u < v && mask_[v]) out.emplace_back(u, v);
    }
    edges_ = std::move(out);
  }
  return *edges_;
}

SubgraphView induce(const Graph& g, NodeMask mask) { return SubgraphView(g, std::move(mask)); }

Matrix spmm(const NormalizedAdjacency& adj, const Matrix& x) { return spmm(adj.matrix, x); }

Matrix spmm(const NormalizedAdjacency& adj, const SubgraphView& view, const Matrix& x) {
  const CsrMatrix& a = adj.matrix;
  const NodeMask& mask = view.mask();
  if (mask.size() != a.rows) throw ShapeError("spmm: mask size != operator size");
  if (a.cols != x.rows()) throw ShapeError("spmm: operator columns != feature rows");
  Matrix out(a.rows, x.cols());
  for (std::size_t r = 0; r < a.rows; ++r) {
    if (!mask[r]) continue;
    auto out_row = out.row(r);
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      if (!mask[a.col[k]]) continue;
      const double w = a.val[k];
      const auto x_row = x.row(a.col[k]);
      for (std::size_t j = 0; j < x.cols(); ++j) out_row[j] += w * x_row[j];
    }
  }
  return out;
}

CsrMatrix masked_operator(const NormalizedAdjacency& adj, const NodeMask& mask) {
  const CsrMatrix& a = adj.matrix;
  if (mask.size() != a.rows) throw ShapeError("masked_operator: mask size != operator size");
  CsrMatrix m;
  m.rows = a.rows;
  m.cols = a.cols;
  m.row_ptr.assign(1, 0);
  m.row_ptr.reserve(a.rows + 1);
  for (std::size_t r = 0; r < a.rows; ++r) {
    if (mask[r]) {
      for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
        if (!mask[a.col[k]]) continue;
        m.col.push_back(a.col[k]);
        m.val.push_back(a.val[k]);
      }
    }
    m.row_ptr.push_back(m.col.size());
  }
  return m;
}

CsrMatrix renormalized_operator(const Graph& g, const NodeMask& mask) {
  if (mask.size() != g.num_nodes())
    throw ShapeError("renormalized_operator: mask size != node count");
  return normalized_csr(g, &mask, [](std::size_t) { return true; });
}

CsrMatrix edge_subset_operator(const Graph& g, std::span<const std::uint8_t> keep) {
  if (keep.size() != g.num_edges())
    throw ShapeError("edge_subset_operator: keep mask size != undirected edge count");
  // Map each directed adjacency slot to its undirected edge id (Graph::edges() order).
  const auto row_ptr = g.row_ptr();
  const auto col_idx = g.col_idx();
  std::vector<std::size_t> slot_edge(col_idx.size());
  std::size_t next_id = 0;
  for (std::size_t u = 0; u < g.num_nodes(); ++u)
    for (std::size_t k = row_ptr[u]; k < row_ptr[u + 1]; ++k)
      if (u < col_idx[k]) slot_edge[k] = next_id++;
  for (std::size_t u = 0; u < g.num_nodes(); ++u) {
    for (std::size_t k = row_ptr[u]; k < row_ptr[u + 1]; ++k) {
      const std::uint32_t v = col_idx[k];
      if (v < u) {
        const auto nb = g.neighbors(v);
        const auto pos = std::lower_bound(nb.begin(), nb.end(), static_cast<std::uint32_t>(u));
        slot_edge[k] = slot_edge[row_ptr[v] + static_cast<std::size_t>(pos - nb.begin())];
      }
    }
  }
  return normalized_csr(g, nullptr, [&](std::size_t k) { return keep[slot_edge[k]] != 0; });
}

}  // namespace sgnn
