#include "sgnn/dataset.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "sgnn/errors.hpp"
#include "sgnn/rng.hpp"

namespace sgnn {

namespace {

enum class Section { none, meta, edges, features, labels, masks };

constexpr std::string_view kSectionNames[] = {"", "#meta", "#edges", "#features", "#labels",
                                              "#masks"};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
T parse_number(std::string_view token, std::size_t line, const char* what) {
  T value{};
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(token) + "'");
  return value;
}

struct MetaValues {
  std::map<std::string, std::pair<std::string, std::size_t>> entries;  // key -> (value, line)

  bool has(const std::string& key) const { return entries.count(key) != 0; }

  std::size_t count(const std::string& key, std::size_t eof_line) const {
    const auto it = entries.find(key);
    if (it == entries.end()) throw ParseError(eof_line, "missing meta key '" + key + "'");
    return parse_number<std::size_t>(it->second.first, it->second.second, key.c_str());
  }
};

bool is_known_meta(std::string_view key) {
  static constexpr std::string_view known[] = {
      "format", "name", "nodes", "edges", "directed_edges", "classes", "features",
      "train",  "val",  "test",  "source", "checksum"};
  return std::find(std::begin(known), std::end(known), key) != std::end(known);
}

std::string canonical_text(const DatasetBundle& b, bool with_checksum, const std::string& checksum) {
  const Graph& g = b.graph;
  std::string out;
  out.reserve(64 + g.num_edges() * 12 + g.num_nodes() * 24);
  auto line = [&out](const std::string& s) {
    out += s;
    out += '\n';
  };
  line("#meta");
  line("format=" + std::string(kDatasetFormat));
  line("name=" + b.name);
  line("nodes=" + std::to_string(g.num_nodes()));
  line("edges=" + std::to_string(g.num_edges()));
  if (b.provenance.directed_edges)
    line("directed_edges=" + std::to_string(*b.provenance.directed_edges));
  line("classes=" + std::to_string(g.num_classes()));
  line("features=" + std::to_string(g.feature_dim()));
  line("train=" + std::to_string(g.train_mask().count()));
  line("val=" + std::to_string(g.val_mask().count()));
  line("test=" + std::to_string(g.test_mask().count()));
  if (!b.provenance.source.empty()) line("source=" + b.provenance.source);
  auto extra = b.provenance.extra;
  std::sort(extra.begin(), extra.end());
  for (const auto& [k, v] : extra) line(k + "=" + v);
  if (with_checksum) line("checksum=" + checksum);

  line("#edges");
  for (const auto& [u, v] : g.edges()) line(std::to_string(u) + " " + std::to_string(v));
  line("#features");
  const Matrix& x = g.features();
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c)
      if (x(r, c) != 0.0)
        line(std::to_string(r) + " " + std::to_string(c) + " " + format_double(x(r, c)));
  line("#labels");
  for (std::size_t v = 0; v < g.num_nodes(); ++v)
    line(std::to_string(v) + " " + std::to_string(g.labels()[v]));
  line("#masks");
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    if (g.train_mask()[v]) line(std::to_string(v) + " train");
    if (g.val_mask()[v]) line(std::to_string(v) + " val");
    if (g.test_mask()[v]) line(std::to_string(v) + " test");
  }
  return out;
}

void check_stat(const char* key, std::size_t declared, std::size_t actual) {
  if (declared != actual)
    throw StatsMismatchError(std::string("meta ") + key + "=" + std::to_string(declared) +
                             " but content has " + std::to_string(actual));
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string compute_checksum(const DatasetBundle& bundle) {
  return sha256_hex(canonical_text(bundle, false, {}));
}

std::string serialize_dataset(const DatasetBundle& bundle) {
  return canonical_text(bundle, true, compute_checksum(bundle));
}

void save_dataset(const DatasetBundle& bundle, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  const std::string text = serialize_dataset(bundle);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

DatasetBundle load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str());
}

DatasetBundle parse_dataset(std::string_view text) {
  Section section = Section::none;
  MetaValues meta;
  std::vector<Edge> edges;
  std::vector<std::tuple<std::size_t, std::size_t, double, std::size_t>> triplets;
  std::vector<std::pair<std::size_t, std::int32_t>> label_lines;
  std::vector<std::size_t> label_line_no;
  std::vector<std::pair<std::size_t, int>> mask_lines;
  std::vector<std::size_t> mask_line_no;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    if (line.front() == '#') {
      const auto it = std::find(std::begin(kSectionNames), std::end(kSectionNames), line);
      if (it == std::end(kSectionNames) || it == std::begin(kSectionNames))
        throw ParseError(line_no, "unknown section '" + std::string(line) + "'");
      const auto next = static_cast<Section>(it - std::begin(kSectionNames));
      if (static_cast<int>(next) != static_cast<int>(section) + 1)
        throw ParseError(line_no, "section '" + std::string(line) + "' out of order");
      section = next;
      continue;
    }

    const auto tok = split_ws(line);
    switch (section) {
      case Section::none:
        throw ParseError(line_no, "content before #meta");
      case Section::meta: {
        const auto eq = line.find('=');
        if (eq == std::string_view::npos || eq == 0)
          throw ParseError(line_no, "expected key=value");
        std::string key(line.substr(0, eq));
        if (meta.has(key)) throw ParseError(line_no, "duplicate meta key '" + key + "'");
        meta.entries[key] = {std::string(line.substr(eq + 1)), line_no};
        break;
      }
      case Section::edges:
        if (tok.size() != 2) throw ParseError(line_no, "expected 'u v'");
        edges.emplace_back(parse_number<std::uint32_t>(tok[0], line_no, "node index"),
                           parse_number<std::uint32_t>(tok[1], line_no, "node index"));
        break;
      case Section::features:
        if (tok.size() != 3) throw ParseError(line_no, "expected 'node dim value'");
        triplets.emplace_back(parse_number<std::size_t>(tok[0], line_no, "node index"),
                              parse_number<std::size_t>(tok[1], line_no, "feature index"),
                              parse_number<double>(tok[2], line_no, "feature value"), line_no);
        break;
      case Section::labels:
        if (tok.size() != 2) throw ParseError(line_no, "expected 'node class'");
        label_lines.emplace_back(parse_number<std::size_t>(tok[0], line_no, "node index"),
                                 parse_number<std::int32_t>(tok[1], line_no, "class index"));
        label_line_no.push_back(line_no);
        break;
      case Section::masks: {
        if (tok.size() != 2) throw ParseError(line_no, "expected 'node train|val|test'");
        int split = -1;
        if (tok[1] == "train") split = 0;
        if (tok[1] == "val") split = 1;
        if (tok[1] == "test") split = 2;
        if (split < 0) throw ParseError(line_no, "unknown split '" + std::string(tok[1]) + "'");
        mask_lines.emplace_back(parse_number<std::size_t>(tok[0], line_no, "node index"), split);
        mask_line_no.push_back(line_no);
        break;
      }
    }
  }
  const std::size_t eof_line = line_no + 1;
  if (section != Section::masks) {
    const auto missing = static_cast<std::size_t>(section) + 1;
    throw ParseError(eof_line, "unexpected end of file, missing section " +
                                   std::string(kSectionNames[missing]));
  }

  const auto format_it = meta.entries.find("format");
  if (format_it == meta.entries.end()) throw ParseError(eof_line, "missing meta key 'format'");
  if (format_it->second.first != kDatasetFormat)
    throw ParseError(format_it->second.second,
                     "unsupported format '" + format_it->second.first + "'");
  const std::size_t n = meta.count("nodes", eof_line);
  const std::size_t num_classes = meta.count("classes", eof_line);
  const std::size_t feature_dim = meta.count("features", eof_line);

  DatasetBundle bundle;
  const auto name_it = meta.entries.find("name");
  if (name_it == meta.entries.end()) throw ParseError(eof_line, "missing meta key 'name'");
  bundle.name = name_it->second.first;
  if (meta.has("source")) bundle.provenance.source = meta.entries["source"].first;
  if (meta.has("directed_edges"))
    bundle.provenance.directed_edges = meta.count("directed_edges", eof_line);
  for (const auto& [key, value] : meta.entries)
    if (!is_known_meta(key)) bundle.provenance.extra.emplace_back(key, value.first);

  Matrix features(n, feature_dim);
  {
    std::vector<std::uint8_t> seen(n * feature_dim, 0);
    for (const auto& [node, dim, value, at] : triplets) {
      if (node >= n) throw ParseError(at, "node " + std::to_string(node) + " out of range");
      if (dim >= feature_dim)
        throw ParseError(at, "feature index " + std::to_string(dim) + " out of range");
      auto& slot = seen[node * feature_dim + dim];
      if (slot) throw ParseError(at, "duplicate feature entry");
      slot = 1;
      features(node, dim) = value;
    }
  }

  std::vector<std::int32_t> labels(n, -1);
  for (std::size_t i = 0; i < label_lines.size(); ++i) {
    const auto [node, cls] = label_lines[i];
    if (node >= n)
      throw ParseError(label_line_no[i], "node " + std::to_string(node) + " out of range");
    if (labels[node] != -1)
      throw ParseError(label_line_no[i], "duplicate label for node " + std::to_string(node));
    labels[node] = cls;
  }
  for (std::size_t v = 0; v < n; ++v)
    if (labels[v] == -1)
      throw ValidationError(ValidationKind::label_out_of_range, static_cast<std::int64_t>(v),
                            "node " + std::to_string(v) + " has no label");

  NodeSplit split{NodeMask(n), NodeMask(n), NodeMask(n)};
  for (std::size_t i = 0; i < mask_lines.size(); ++i) {
    const auto [node, which] = mask_lines[i];
    if (node >= n)
      throw ParseError(mask_line_no[i], "node " + std::to_string(node) + " out of range");
    NodeMask& target = which == 0 ? split.train : which == 1 ? split.val : split.test;
    if (target[node])
      throw ParseError(mask_line_no[i], "duplicate mask entry for node " + std::to_string(node));
    target.set(node, true);
  }

  BuildReport report =
      build_graph(n, num_classes, edges, std::move(features), std::move(labels), std::move(split));
  bundle.graph = std::move(report.graph);
  if (report.self_loops_dropped > 0)
    bundle.warnings.push_back("dropped " + std::to_string(report.self_loops_dropped) +
                              " self-loop(s)");

  const Graph& g = bundle.graph;
  check_stat("edges", meta.count("edges", eof_line), g.num_edges());
  check_stat("train", meta.count("train", eof_line), g.train_mask().count());
  check_stat("val", meta.count("val", eof_line), g.val_mask().count());
  check_stat("test", meta.count("test", eof_line), g.test_mask().count());

  const std::string actual = compute_checksum(bundle);
  const auto checksum_it = meta.entries.find("checksum");
  if (checksum_it == meta.entries.end()) {
    bundle.warnings.push_back("no checksum in #meta");
  } else if (checksum_it->second.first != actual) {
    throw ChecksumMismatchError("checksum mismatch: file says " + checksum_it->second.first +
                                ", content hashes to " + actual);
  }
  bundle.provenance.checksum = actual;
  return bundle;
}

NodeSplit standard_split(std::span<const std::int32_t> labels, std::size_t num_classes,
                         std::size_t per_class_train, std::size_t val, std::uint64_t seed) {
  if (per_class_train == 0) throw ConfigError("standard_split: per_class_train must be positive");
  const std::size_t n = labels.size();
  Rng rng(seed, Stream::split);
  auto shuffle = [&rng](std::vector<std::uint32_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
  };

  std::vector<std::vector<std::uint32_t>> by_class(num_classes);
  for (std::size_t v = 0; v < n; ++v) {
    if (labels[v] < 0 || static_cast<std::size_t>(labels[v]) >= num_classes)
      throw ValidationError(ValidationKind::label_out_of_range, static_cast<std::int64_t>(v),
                            "node " + std::to_string(v) + " has an out-of-range label");
    by_class[static_cast<std::size_t>(labels[v])].push_back(static_cast<std::uint32_t>(v));
  }

  NodeSplit split{NodeMask(n), NodeMask(n), NodeMask(n)};
  std::vector<std::uint32_t> rest;
  for (std::size_t c = 0; c < num_classes; ++c) {
    auto& nodes = by_class[c];
    if (nodes.size() < per_class_train)
      throw DataError("standard_split: class " + std::to_string(c) + " has " +
                      std::to_string(nodes.size()) + " nodes, need " +
                      std::to_string(per_class_train));
    shuffle(nodes);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (i < per_class_train) {
        split.train.set(nodes[i], true);
      } else {
        rest.push_back(nodes[i]);
      }
    }
  }
  if (rest.size() < val)
    throw DataError("standard_split: only " + std::to_string(rest.size()) +
                    " nodes left for a validation set of " + std::to_string(val));
  std::sort(rest.begin(), rest.end());
  shuffle(rest);
  for (std::size_t i = 0; i < rest.size(); ++i) (i < val ? split.val : split.test).set(rest[i], true);
  return split;
}

NodeSplit standard_split(const Graph& g, std::size_t per_class_train, std::size_t val,
                         std::uint64_t seed) {
  return standard_split(g.labels(), g.num_classes(), per_class_train, val, seed);
}

}  // namespace sgnn
