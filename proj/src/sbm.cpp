#include "sgnn/sbm.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <string>

#include "sgnn/errors.hpp"
#include "sgnn/rng.hpp"

namespace sgnn {

namespace {

template <typename T>
T spec_number(std::string_view token, std::string_view spec) {
  T value{};
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("bad number '" + std::string(token) + "' in '" + std::string(spec) + "'");
  return value;
}

std::string short_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

void SbmConfig::validate() const {
  if (blocks == 0 || nodes_per_block == 0) throw ConfigError("sbm: empty graph");
  if (!(p_intra >= 0.0 && p_intra <= 1.0) || !(p_inter >= 0.0 && p_inter <= 1.0))
    throw ConfigError("sbm: edge probabilities must lie in [0, 1]");
  if (feature_dim < blocks) throw ConfigError("sbm: feature_dim must be >= blocks");
  if (!(noise >= 0.0)) throw ConfigError("sbm: noise must be non-negative");
  if (num_nodes() > 0xffffffffULL) throw ConfigError("sbm: too many nodes");
}

SbmConfig parse_sbm_spec(std::string_view spec, std::uint64_t seed) {
  constexpr std::string_view prefix = "sbm:";
  if (spec.substr(0, prefix.size()) != prefix)
    throw ConfigError("synthetic spec must start with 'sbm:', got '" + std::string(spec) + "'");
  std::string_view rest = spec.substr(prefix.size());
  std::vector<std::string_view> parts;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    parts.push_back(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  if (parts.empty()) throw ConfigError("sbm spec needs BxN, e.g. sbm:3x100");
  const auto x = parts[0].find('x');
  if (x == std::string_view::npos) throw ConfigError("sbm spec needs BxN, e.g. sbm:3x100");

  SbmConfig cfg;
  cfg.seed = seed;
  cfg.blocks = spec_number<std::size_t>(parts[0].substr(0, x), spec);
  cfg.nodes_per_block = spec_number<std::size_t>(parts[0].substr(x + 1), spec);
  cfg.val_count = std::min<std::size_t>(500, cfg.num_nodes() / 3);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("sbm option '" + std::string(parts[i]) + "' is not key=value");
    const auto key = parts[i].substr(0, eq);
    const auto value = parts[i].substr(eq + 1);
    if (key == "p_in") {
      cfg.p_intra = spec_number<double>(value, spec);
    } else if (key == "p_out") {
      cfg.p_inter = spec_number<double>(value, spec);
    } else if (key == "dim") {
      cfg.feature_dim = spec_number<std::size_t>(value, spec);
    } else if (key == "noise") {
      cfg.noise = spec_number<double>(value, spec);
    } else if (key == "train") {
      cfg.train_per_class = spec_number<std::size_t>(value, spec);
    } else if (key == "val") {
      cfg.val_count = spec_number<std::size_t>(value, spec);
    } else {
      throw ConfigError("unknown sbm option '" + std::string(key) + "'");
    }
  }
  cfg.validate();
  return cfg;
}

double sbm_expected_edges(const SbmConfig& cfg) {
  const double b = static_cast<double>(cfg.blocks);
  const double m = static_cast<double>(cfg.nodes_per_block);
  const double intra_pairs = b * m * (m - 1.0) / 2.0;
  const double inter_pairs = b * (b - 1.0) / 2.0 * m * m;
  return intra_pairs * cfg.p_intra + inter_pairs * cfg.p_inter;
}

double sbm_edge_variance(const SbmConfig& cfg) {
  const double b = static_cast<double>(cfg.blocks);
  const double m = static_cast<double>(cfg.nodes_per_block);
  const double intra_pairs = b * m * (m - 1.0) / 2.0;
  const double inter_pairs = b * (b - 1.0) / 2.0 * m * m;
  return intra_pairs * cfg.p_intra * (1.0 - cfg.p_intra) +
         inter_pairs * cfg.p_inter * (1.0 - cfg.p_inter);
}

DatasetBundle generate_sbm(const SbmConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.num_nodes();
  std::vector<std::int32_t> labels(n);
  for (std::size_t v = 0; v < n; ++v)
    labels[v] = static_cast<std::int32_t>(v / cfg.nodes_per_block);

  Rng rng(cfg.seed, Stream::data);
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      const double p = labels[u] == labels[v] ? cfg.p_intra : cfg.p_inter;
      if (rng.bernoulli(p))
        edges.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
    }

  Matrix features(n, cfg.feature_dim);
  for (std::size_t v = 0; v < n; ++v) {
    auto row = features.row(v);
    for (double& f : row) f = cfg.noise * rng.normal();
    row[static_cast<std::size_t>(labels[v])] += 1.0;
  }

  NodeSplit split = standard_split(labels, cfg.blocks, cfg.train_per_class, cfg.val_count, cfg.seed);
  DatasetBundle bundle;
  bundle.name = "sbm_" + std::to_string(cfg.blocks) + "x" + std::to_string(cfg.nodes_per_block);
  bundle.provenance.source = "sbm p_in=" + short_double(cfg.p_intra) +
                             " p_out=" + short_double(cfg.p_inter) +
                             " dim=" + std::to_string(cfg.feature_dim) +
                             " noise=" + short_double(cfg.noise) +
                             " seed=" + std::to_string(cfg.seed);
  bundle.graph = build_graph(n, cfg.blocks, edges, std::move(features), std::move(labels),
                             std::move(split))
                     .graph;
  bundle.provenance.checksum = compute_checksum(bundle);
  return bundle;
}

}  // namespace sgnn
