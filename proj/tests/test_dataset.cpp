#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sgnn/dataset.hpp"
#include "sgnn/errors.hpp"
#include "sgnn/sbm.hpp"

using namespace sgnn;
namespace fs = std::filesystem;

namespace {

// 4 nodes, 2 classes, path 0-1-2-3; no checksum line.
const char* kTiny =
    "#meta\n"
    "format=sgnn-graph-v1\n"
    "name=tiny\n"
    "nodes=4\n"
    "edges=3\n"
    "classes=2\n"
    "features=2\n"
    "train=2\n"
    "val=1\n"
    "test=1\n"
    "#edges\n"
    "0 1\n"
    "1 2\n"
    "2 3\n"
    "#features\n"
    "0 0 1\n"
    "1 1 0.5\n"
    "3 0 -2\n"
    "#labels\n"
    "0 0\n"
    "1 1\n"
    "2 0\n"
    "3 1\n"
    "#masks\n"
    "0 train\n"
    "1 train\n"
    "2 val\n"
    "3 test\n";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse_dataset(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  FAIL("expected ParseError");
  return 0;
}

}  // namespace

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("parse the tiny dataset") {
  const DatasetBundle b = parse_dataset(kTiny);
  CHECK(b.name == "tiny");
  const Graph& g = b.graph;
  CHECK(g.num_nodes() == 4);
  CHECK(g.num_edges() == 3);
  CHECK(g.num_classes() == 2);
  CHECK(g.feature_dim() == 2);
  CHECK(g.features()(1, 1) == 0.5);
  CHECK(g.features()(3, 0) == -2.0);
  CHECK(g.features()(2, 0) == 0.0);
  CHECK(g.labels()[3] == 1);
  CHECK(g.train_mask().count() == 2);
  CHECK(g.val_mask()[2]);
  CHECK(g.test_mask()[3]);
  REQUIRE(b.warnings.size() == 1);
  CHECK(b.warnings[0].find("checksum") != std::string::npos);
}

TEST_CASE("serialize is canonical and round-trips byte-identically") {
  const DatasetBundle b = parse_dataset(kTiny);
  const std::string text = serialize_dataset(b);
  CHECK(text.find("checksum=" + compute_checksum(b)) != std::string::npos);
  const DatasetBundle again = parse_dataset(text);
  CHECK(again.warnings.empty());
  CHECK(serialize_dataset(again) == text);
  CHECK(again.graph.features() == b.graph.features());
  CHECK(again.graph.edges() == b.graph.edges());
}

TEST_CASE("round trip preserves doubles exactly") {
  DatasetBundle b = generate_sbm(SbmConfig{});
  const std::string text = serialize_dataset(b);
  const DatasetBundle again = parse_dataset(text);
  CHECK(again.graph.features() == b.graph.features());
  CHECK(std::equal(again.graph.labels().begin(), again.graph.labels().end(),
                   b.graph.labels().begin()));
  CHECK(again.graph.split().train == b.graph.split().train);
  CHECK(serialize_dataset(again) == text);
}

TEST_CASE("save and load through the filesystem") {
  const fs::path dir = fs::temp_directory_path() / "sgnn_test_dataset";
  fs::create_directories(dir);
  const DatasetBundle b = generate_sbm(parse_sbm_spec("sbm:2x30", 4));
  save_dataset(b, dir / "g.graphtxt");
  const DatasetBundle l = load_dataset(dir / "g.graphtxt");
  CHECK(l.provenance.checksum == compute_checksum(b));
  CHECK(serialize_dataset(l) == serialize_dataset(b));
  CHECK_THROWS_AS(load_dataset(dir / "missing.graphtxt"), DataError);
  fs::remove_all(dir);
}

TEST_CASE("unknown meta keys and provenance survive a round trip") {
  std::string text = replace(kTiny, "test=1\n", "test=1\nsource=hand made\nzeta=1\nalpha=x y\n");
  text = replace(text, "edges=3\n", "edges=3\ndirected_edges=4\n");
  const DatasetBundle b = parse_dataset(text);
  CHECK(b.provenance.source == "hand made");
  CHECK(b.provenance.directed_edges == 4u);
  REQUIRE(b.provenance.extra.size() == 2);
  const std::string out = serialize_dataset(b);
  CHECK(out.find("source=hand made\nalpha=x y\nzeta=1\nchecksum=") != std::string::npos);
  CHECK(serialize_dataset(parse_dataset(out)) == out);
}

TEST_CASE("truncated input reports a line number") {
  const std::string text = kTiny;
  const std::string cut = text.substr(0, text.find("#labels"));
  const std::size_t lines = static_cast<std::size_t>(std::count(cut.begin(), cut.end(), '\n'));
  try {
    parse_dataset(cut);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == lines + 1);
    CHECK(std::string(e.what()).find("#labels") != std::string::npos);
  }
}

TEST_CASE("malformed lines point at themselves") {
  CHECK(parse_error_line(replace(kTiny, "1 2\n", "1 x\n")) == 13);
  CHECK(parse_error_line(replace(kTiny, "1 2\n", "1 2 3\n")) == 13);
  CHECK(parse_error_line(replace(kTiny, "3 test\n", "3 holdout\n")) == 28);
  CHECK(parse_error_line(replace(kTiny, "#features\n", "#weights\n")) == 15);
  CHECK(parse_error_line(replace(kTiny, "format=sgnn-graph-v1", "format=other")) == 2);
  CHECK(parse_error_line(replace(kTiny, "3 0 -2\n", "3 5 -2\n")) == 18);
  CHECK(parse_error_line(replace(kTiny, "2 0\n3 1\n", "2 0\n2 1\n3 1\n")) == 23);
}

TEST_CASE("declared counts must match the data") {
  CHECK_THROWS_AS(parse_dataset(replace(kTiny, "edges=3", "edges=4")), StatsMismatchError);
  CHECK_THROWS_AS(parse_dataset(replace(kTiny, "train=2", "train=3")), StatsMismatchError);
  CHECK_THROWS_AS(parse_dataset(replace(kTiny, "val=1", "val=0")), StatsMismatchError);
}

TEST_CASE("validation errors carry kind and node") {
  try {
    parse_dataset(replace(kTiny, "3 1\n#masks", "3 7\n#masks"));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.kind() == ValidationKind::label_out_of_range);
    CHECK(e.node() == 3);
  }
  CHECK_THROWS_AS(parse_dataset(replace(kTiny, "2 3\n", "2 9\n")), DataError);
}

TEST_CASE("checksum mismatch is detected") {
  std::string text = serialize_dataset(parse_dataset(kTiny));
  text = replace(text, "3 0 -2\n", "3 0 -3\n");
  CHECK_THROWS_AS(parse_dataset(text), ChecksumMismatchError);
}

TEST_CASE("self-loops are dropped with a warning") {
  std::string text = replace(kTiny, "2 3\n", "2 2\n2 3\n");
  const DatasetBundle b = parse_dataset(text);
  CHECK(b.graph.num_edges() == 3);
  bool seen = false;
  for (const auto& w : b.warnings) seen = seen || w.find("self-loop") != std::string::npos;
  CHECK(seen);
}

TEST_CASE("sbm spec parsing") {
  const SbmConfig c = parse_sbm_spec("sbm:3x100", 9);
  CHECK(c.blocks == 3);
  CHECK(c.nodes_per_block == 100);
  CHECK(c.val_count == 100);
  CHECK(c.seed == 9);
  const SbmConfig d = parse_sbm_spec("sbm:4x50,p_in=0.2,p_out=0.01,dim=8,noise=0.5,train=5,val=20", 1);
  CHECK(d.p_intra == 0.2);
  CHECK(d.p_inter == 0.01);
  CHECK(d.feature_dim == 8);
  CHECK(d.noise == 0.5);
  CHECK(d.train_per_class == 5);
  CHECK(d.val_count == 20);
  CHECK(parse_sbm_spec("sbm:5x3000", 1).val_count == 500);
  CHECK_THROWS_AS(parse_sbm_spec("cora", 1), ConfigError);
  CHECK_THROWS_AS(parse_sbm_spec("sbm:3", 1), ConfigError);
  CHECK_THROWS_AS(parse_sbm_spec("sbm:3x10,color=red", 1), ConfigError);
  CHECK_THROWS_AS(parse_sbm_spec("sbm:3x10,p_in=2", 1).validate(), ConfigError);
}

TEST_CASE("sbm structure") {
  const SbmConfig cfg = parse_sbm_spec("sbm:3x100", 1);
  const DatasetBundle b = generate_sbm(cfg);
  const Graph& g = b.graph;
  CHECK(b.name == "sbm_3x100");
  CHECK(g.num_nodes() == 300);
  CHECK(g.num_classes() == 3);
  CHECK(g.feature_dim() == 16);
  CHECK(g.train_mask().count() == 60);
  CHECK(g.val_mask().count() == 100);
  CHECK(g.test_mask().count() == 140);
  // Expected edge count: 3 C(100,2) 0.1 + 3 100^2 0.005.
  CHECK(sbm_expected_edges(cfg) == doctest::Approx(3 * 4950 * 0.1 + 3 * 10000 * 0.005));
  CHECK(std::abs(static_cast<double>(g.num_edges()) - sbm_expected_edges(cfg)) <
        4.0 * std::sqrt(sbm_edge_variance(cfg)));
  std::size_t intra = 0;
  for (const auto& [u, v] : g.edges()) intra += g.labels()[u] == g.labels()[v];
  CHECK(static_cast<double>(intra) / g.num_edges() > 0.7);
  for (std::size_t v = 0; v < 300; ++v) CHECK(g.labels()[v] == static_cast<std::int32_t>(v / 100));
}

TEST_CASE("sbm edge count over many seeds matches the expectation") {
  SbmConfig cfg = parse_sbm_spec("sbm:2x40,p_in=0.3,p_out=0.05", 0);
  double total = 0.0;
  const int reps = 200;
  for (int s = 0; s < reps; ++s) {
    cfg.seed = static_cast<std::uint64_t>(s);
    total += static_cast<double>(generate_sbm(cfg).graph.num_edges());
  }
  const double mean = total / reps;
  CHECK(std::abs(mean - sbm_expected_edges(cfg)) < 4.0 * std::sqrt(sbm_edge_variance(cfg) / reps));
}

TEST_CASE("sbm generation is deterministic in the seed") {
  const auto a = serialize_dataset(generate_sbm(parse_sbm_spec("sbm:3x50", 3)));
  const auto b = serialize_dataset(generate_sbm(parse_sbm_spec("sbm:3x50", 3)));
  const auto c = serialize_dataset(generate_sbm(parse_sbm_spec("sbm:3x50", 4)));
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("standard_split") {
  std::vector<std::int32_t> labels;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 50; ++i) labels.push_back(c);
  const NodeSplit s = standard_split(labels, 3, 10, 40, 7);
  CHECK(s.train.count() == 30);
  CHECK(s.val.count() == 40);
  CHECK(s.test.count() == 80);
  std::vector<int> per_class(3, 0);
  for (std::size_t v = 0; v < labels.size(); ++v) {
    CHECK(int(s.train[v]) + int(s.val[v]) + int(s.test[v]) == 1);
    if (s.train[v]) ++per_class[static_cast<std::size_t>(labels[v])];
  }
  CHECK(per_class == std::vector<int>{10, 10, 10});
  const NodeSplit again = standard_split(labels, 3, 10, 40, 7);
  CHECK(again.train == s.train);
  CHECK(again.val == s.val);
  CHECK_FALSE(standard_split(labels, 3, 10, 40, 8).train == s.train);

  CHECK_THROWS_AS(standard_split(labels, 3, 0, 10, 1), ConfigError);
  CHECK_THROWS_AS(standard_split(labels, 3, 51, 0, 1), DataError);
  CHECK_THROWS_AS(standard_split(labels, 3, 10, 121, 1), DataError);
}

// Runs only when converted citation data is available.
TEST_CASE("converted Cora, if present, has the canonical shape") {
  const char* dir = std::getenv("SGNN_DATA_DIR");
  const fs::path path = fs::path(dir ? dir : "data") / "cora.graphtxt";
  if (!fs::exists(path)) {
    MESSAGE("no converted Cora at " << path.string() << "; skipped");
    return;
  }
  const DatasetBundle b = load_dataset(path);
  CHECK(b.graph.num_nodes() == 2708);
  CHECK(b.graph.num_classes() == 7);
  CHECK(b.graph.train_mask().count() == 140);
}
