#pragma once

// Test-only reference computations. Everything here works on dense matrices
// and plain loops so it shares no code path with the engine it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "sgnn/graph.hpp"
#include "sgnn/matrix.hpp"
#include "sgnn/rng.hpp"

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense zeros(std::size_t r, std::size_t c) { return Dense(r, std::vector<double>(c, 0.0)); }

inline Dense from_matrix(const sgnn::Matrix& m) {
  Dense d = zeros(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) d[i][j] = m(i, j);
  return d;
}

inline Dense mul(const Dense& a, const Dense& b) {
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  Dense out = zeros(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += a[i][t] * b[t][j];
      out[i][j] = acc;
    }
  return out;
}

// Dense adjacency of a graph from its undirected edge list.
inline Dense adjacency(std::size_t n, const std::vector<sgnn::Edge>& edges) {
  Dense a = zeros(n, n);
  for (const auto& [u, v] : edges) {
    a[u][v] = 1.0;
    a[v][u] = 1.0;
  }
  return a;
}

// D^{-1/2} (A + I) D^{-1/2} computed densely.
inline Dense gcn_normalize(const Dense& a) {
  const std::size_t n = a.size();
  Dense ai = a;
  for (std::size_t i = 0; i < n; ++i) ai[i][i] += 1.0;
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i] += ai[i][j];
  Dense out = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out[i][j] = ai[i][j] == 0.0 ? 0.0 : ai[i][j] / std::sqrt(d[i]) / std::sqrt(d[j]);
  return out;
}

// Edges of `edges` with both endpoints in `active`, by linear filtering.
inline std::vector<sgnn::Edge> filter_edges(const std::vector<sgnn::Edge>& edges,
                                            const std::vector<bool>& active) {
  std::vector<sgnn::Edge> out;
  for (const auto& e : edges)
    if (active[e.first] && active[e.second]) out.push_back(e);
  return out;
}

// Dense two-layer GCN replay: op * relu(op * x * w1 + b1) * w2 + b2.
inline Dense gcn_forward(const Dense& op, const Dense& x, const Dense& w1, const Dense& b1,
                         const Dense& w2, const Dense& b2) {
  Dense h = mul(mul(op, x), w1);
  for (auto& row : h)
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!b1.empty()) row[j] += b1[0][j];
      row[j] = std::max(0.0, row[j]);
    }
  Dense out = mul(mul(op, h), w2);
  if (!b2.empty())
    for (auto& row : out)
      for (std::size_t j = 0; j < row.size(); ++j) row[j] += b2[0][j];
  return out;
}

// Random simple undirected graph with edge probability p.
inline std::vector<sgnn::Edge> random_edges(std::size_t n, double p, sgnn::Rng& rng) {
  std::vector<sgnn::Edge> e;
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v)
      if (rng.uniform() < p) e.emplace_back(u, v);
  return e;
}

inline sgnn::Matrix random_matrix(std::size_t r, std::size_t c, sgnn::Rng& rng,
                                  double scale = 1.0) {
  sgnn::Matrix m(r, c);
  for (double& v : m.values()) v = scale * (2.0 * rng.uniform() - 1.0);
  return m;
}

// Graph with random features/labels and every node in the train split.
inline sgnn::Graph random_graph(std::size_t n, double p, std::size_t feature_dim,
                                std::size_t classes, sgnn::Rng& rng) {
  auto edges = random_edges(n, p, rng);
  std::vector<std::int32_t> labels(n);
  for (auto& l : labels) l = static_cast<std::int32_t>(rng.below(classes));
  sgnn::NodeSplit split{sgnn::NodeMask(n, true), sgnn::NodeMask(n), sgnn::NodeMask(n)};
  return sgnn::build_graph(n, classes, edges, random_matrix(n, feature_dim, rng), labels, split)
      .graph;
}

// --- statistics ------------------------------------------------------------

// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

inline double chi2_critical(double dof, double alpha = 0.01) {
  boost::math::chi_squared dist(dof);
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

inline double poisson_pmf(std::size_t k, double mean) {
  return std::exp(static_cast<double>(k) * std::log(mean) - mean -
                  std::lgamma(static_cast<double>(k) + 1.0));
}

struct ChiSquare {
  double statistic = 0.0;
  double dof = 0.0;
  double critical = 0.0;
  bool passes() const { return statistic < critical; }
};

// Goodness of fit of integer counts to a pmf. Bins are [0], [1], ...; the
// upper tail and sparse bins are merged until each has expectation >= 5.
template <typename Pmf>
ChiSquare chi_square_gof(const std::vector<std::size_t>& samples, Pmf pmf) {
  const double n = static_cast<double>(samples.size());
  std::size_t max_k = 0;
  for (auto s : samples) max_k = std::max(max_k, s);
  std::vector<double> observed(max_k + 2, 0.0), expected(max_k + 2, 0.0);
  for (auto s : samples) observed[s] += 1.0;
  double mass = 0.0;
  for (std::size_t k = 0; k <= max_k; ++k) {
    expected[k] = n * pmf(k);
    mass += pmf(k);
  }
  expected[max_k + 1] = n * std::max(0.0, 1.0 - mass);  // tail beyond max_k

  std::vector<double> obs_bins, exp_bins;
  double o = 0.0, e = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    o += observed[k];
    e += expected[k];
    if (e >= 5.0) {
      obs_bins.push_back(o);
      exp_bins.push_back(e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    obs_bins.back() += o;
    exp_bins.back() += e;
  }
  ChiSquare r;
  for (std::size_t i = 0; i < obs_bins.size(); ++i)
    r.statistic += (obs_bins[i] - exp_bins[i]) * (obs_bins[i] - exp_bins[i]) / exp_bins[i];
  r.dof = static_cast<double>(obs_bins.size() - 1);
  r.critical = chi2_critical(r.dof);
  return r;
}

// Two-sample homogeneity test on integer-valued samples; bins with pooled
// count < 10 are merged with their neighbours.
inline ChiSquare chi_square_two_sample(const std::vector<std::size_t>& a,
                                       const std::vector<std::size_t>& b) {
  std::size_t max_k = 0;
  for (auto s : a) max_k = std::max(max_k, s);
  for (auto s : b) max_k = std::max(max_k, s);
  std::vector<double> ca(max_k + 1, 0.0), cb(max_k + 1, 0.0);
  for (auto s : a) ca[s] += 1.0;
  for (auto s : b) cb[s] += 1.0;
  std::vector<std::pair<double, double>> bins;
  double x = 0.0, y = 0.0;
  for (std::size_t k = 0; k <= max_k; ++k) {
    x += ca[k];
    y += cb[k];
    if (x + y >= 10.0) {
      bins.emplace_back(x, y);
      x = y = 0.0;
    }
  }
  if (x + y > 0.0) {
    bins.back().first += x;
    bins.back().second += y;
  }
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  ChiSquare r;
  for (const auto& [oa, ob] : bins) {
    const double pooled = (oa + ob) / (na + nb);
    const double ea = pooled * na, eb = pooled * nb;
    r.statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  r.dof = static_cast<double>(bins.size() - 1);
  r.critical = chi2_critical(r.dof);
  return r;
}

// 2 x k contingency homogeneity test on per-category counts from two
// schemes with equal trial counts.
inline ChiSquare chi_square_contingency(const std::vector<double>& a, const std::vector<double>& b,
                                        double trials) {
  // Each category is a 2x2 table (kept / dropped) in disguise; sum over
  // categories of the per-category homogeneity statistic with 1 dof each.
  ChiSquare r;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double keep = a[i] + b[i];
    const double drop = 2.0 * trials - keep;
    if (keep == 0.0 || drop == 0.0) continue;
    const double ek = keep / 2.0, ed = drop / 2.0;
    r.statistic += (a[i] - ek) * (a[i] - ek) / ek + (b[i] - ek) * (b[i] - ek) / ek +
                   ((trials - a[i]) - ed) * ((trials - a[i]) - ed) / ed +
                   ((trials - b[i]) - ed) * ((trials - b[i]) - ed) / ed;
    r.dof += 1.0;
  }
  r.critical = chi2_critical(r.dof);
  return r;
}

}  // namespace oracle
