#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sgnn/graph.hpp"

namespace sgnn {

// Text dataset format, one UTF-8 file, LF line endings:
//
//   #meta                      key=value lines, canonical order:
//     format=sgnn-graph-v1
//     name=<name>
//     nodes=<N>  edges=<undirected E>  [directed_edges=<D>]
//     classes=<C>  features=<F>  train=<a>  val=<b>  test=<c>
//     [source=<text>]  [other keys, sorted]  checksum=<sha256 hex>
//   #edges                     "u v", u < v, sorted
//   #features                  "node dim value", nonzero only, sorted, %.17g
//   #labels                    "node class", one line per node, sorted
//   #masks                     "node train|val|test", sorted by node
//
// The checksum is SHA-256 over the canonical text with the checksum line
// removed.
inline constexpr std::string_view kDatasetFormat = "sgnn-graph-v1";

struct Provenance {
  std::string source;
  std::optional<std::size_t> directed_edges;
  std::string checksum;
  // Unrecognized meta keys, preserved verbatim and written back sorted.
  std::vector<std::pair<std::string, std::string>> extra;
};

struct DatasetBundle {
  std::string name;
  Graph graph;
  Provenance provenance;
  // Non-fatal observations made while loading (dropped self-loops, missing checksum).
  std::vector<std::string> warnings;
};

// Parses and validates. Throws ParseError (with line number), ValidationError,
// StatsMismatchError or ChecksumMismatchError.
DatasetBundle parse_dataset(std::string_view text);
DatasetBundle load_dataset(const std::filesystem::path& path);

// Canonical form including the checksum line.
std::string serialize_dataset(const DatasetBundle& bundle);
// SHA-256 of the canonical form without the checksum line.
std::string compute_checksum(const DatasetBundle& bundle);
void save_dataset(const DatasetBundle& bundle, const std::filesystem::path& path);

std::string sha256_hex(std::string_view data);

// Per class, `per_class_train` nodes go to train; then `val` nodes drawn
// from the remainder go to val; everything left is test. Deterministic in
// `seed`. Throws DataError when a class is too small or the remainder
// cannot supply `val` nodes, ConfigError when per_class_train is 0.
NodeSplit standard_split(std::span<const std::int32_t> labels, std::size_t num_classes,
                         std::size_t per_class_train, std::size_t val, std::uint64_t seed);
NodeSplit standard_split(const Graph& g, std::size_t per_class_train, std::size_t val,
                         std::uint64_t seed);

}  // namespace sgnn
