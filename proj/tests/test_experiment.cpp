#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "sgnn/errors.hpp"
#include "sgnn/experiment.hpp"
#include "sgnn/sbm.hpp"

using namespace sgnn;

namespace {

const DatasetBundle& sbm() {
  static const DatasetBundle data = generate_sbm(SbmConfig{});
  return data;
}

ConfigMap short_run() {
  ConfigMap cfg = default_config();
  cfg["data.synthetic"] = "sbm:3x100";
  cfg["train.epochs"] = "30";
  return cfg;
}

}  // namespace

TEST_CASE("default config covers every key and converts") {
  const ConfigMap cfg = default_config();
  CHECK(cfg.size() == config_keys().size());
  const TrainConfig tc = to_train_config(cfg);
  CHECK(tc.epochs == 200);
  CHECK(tc.reg.kind == RegKind::none);
  CHECK(tc.model.hidden == 16);
  CHECK(tc.opt.lr == 0.01);
  CHECK(tc.opt.weight_decay == 5e-4);
  CHECK(tc.reg.t_cut == 0.7);
  CHECK_FALSE(tc.record_time);
}

TEST_CASE("config parsing and merging") {
  const ConfigMap parsed = parse_config_text(
      "# comment\n reg.kind = sgnn \nreg.lambda=2\nmanifest_version=1\ndataset.checksum=abc\n");
  CHECK(parsed.at("reg.kind") == "sgnn");
  CHECK(parsed.at("reg.lambda") == "2");
  CHECK(parsed.at("dataset.checksum") == "abc");
  CHECK(parsed.count("manifest_version") == 0);
  CHECK_THROWS_AS(parse_config_text("no equals sign"), ConfigError);

  const ConfigMap merged = merge_config(default_config(), parsed);
  CHECK(merged.at("reg.kind") == "sgnn");
  CHECK(merged.at("train.epochs") == "200");
  CHECK_THROWS_AS(merge_config(default_config(), ConfigMap{{"reg.lamda", "1"}}), ConfigError);
}

TEST_CASE("bad values are config errors") {
  for (auto [key, value] : std::vector<std::pair<std::string, std::string>>{
           {"reg.kind", "mixup"},
           {"reg.lambda", "fast"},
           {"reg.p", "1.5"},
           {"train.epochs", "-3"},
           {"train.select", "median"},
           {"model.bias", "maybe"},
           {"train.regime", "online"}}) {
    ConfigMap cfg = default_config();
    cfg["reg.kind"] = "dropout";
    cfg[key] = value;
    INFO(key << "=" << value);
    CHECK_THROWS_AS(to_train_config(cfg), ConfigError);
  }
}

TEST_CASE("data source selection") {
  ConfigMap cfg = default_config();
  CHECK_THROWS_AS(load_configured_data(cfg), ConfigError);
  cfg["data.synthetic"] = "sbm:2x40";
  cfg["data.path"] = "x.graphtxt";
  CHECK_THROWS_AS(load_configured_data(cfg), ConfigError);
  cfg["data.path"] = "";
  const DatasetBundle d = load_configured_data(cfg);
  CHECK(d.graph.num_nodes() == 80);
  cfg["dataset.checksum"] = d.provenance.checksum;
  CHECK_NOTHROW(load_configured_data(cfg));
  cfg["dataset.checksum"] = std::string(64, '0');
  CHECK_THROWS_AS(load_configured_data(cfg), ChecksumMismatchError);
}

TEST_CASE("seed lists") {
  CHECK(parse_seed_list("1,2, 3") == std::vector<std::uint64_t>{1, 2, 3});
  CHECK_THROWS_AS(parse_seed_list(""), ConfigError);
  CHECK_THROWS_AS(parse_seed_list("1,x"), ConfigError);
}

TEST_CASE("summarize uses the sample standard deviation") {
  const std::vector<double> v{1, 2, 3, 4};
  const CellStats s = summarize(v);
  CHECK(s.mean == 2.5);
  CHECK(s.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(summarize(std::vector<double>{0.7}).stddev == 0.0);
}

TEST_CASE("parallel_for runs every job once and rethrows the lowest failure") {
  std::vector<int> hits(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  try {
    parallel_for(50, 4, [](std::size_t i) {
      if (i == 7 || i == 30) throw ConfigError("job " + std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()) == "job 7");
  }
}

TEST_CASE("run_csv layout") {
  RunRecord r;
  RunRow a;
  a.step = 1;
  a.t = 0.0;
  a.loss = std::nan("");
  a.active_frac = 0.0;
  RunRow b;
  b.step = 2;
  b.t = 0.5;
  b.loss = 1.25;
  b.val_acc = 0.5;
  b.test_acc = 0.75;
  r.rows = {a, b};
  CHECK(run_csv(r) ==
        "step,t,loss,val_acc,test_acc,active_frac,ms\n"
        "1,0,nan,0.000000,0.000000,0.000000,0.000\n"
        "2,0.5,1.25,0.500000,0.750000,1.000000,0.000\n");
}

TEST_CASE("manifest lists every key and round-trips as a config") {
  const ConfigMap cfg = short_run();
  const std::vector<std::uint64_t> seeds{4};
  const std::string m = manifest_text("train", cfg, sbm(), seeds);
  CHECK(m.find("csv_schema=1\n") != std::string::npos);
  CHECK(m.find("command=train\n") != std::string::npos);
  CHECK(m.find("dataset.checksum=" + sbm().provenance.checksum + "\n") != std::string::npos);
  CHECK(m.find("seeds=4\n") != std::string::npos);
  ConfigMap back = parse_config_text(m);
  CHECK(back.at("dataset.checksum") == sbm().provenance.checksum);
  back.erase("dataset.checksum");
  CHECK(back == cfg);
}

TEST_CASE("grid parsing") {
  const std::vector<std::string> tokens{"lambda=0.5,1,2", "reg.t_cut=0.3,0.7"};
  const auto grid = parse_grid(tokens);
  REQUIRE(grid.size() == 2);
  CHECK(grid[0].key == "reg.lambda");
  CHECK(grid[0].values.size() == 3);
  CHECK(grid[1].key == "reg.t_cut");
  CHECK_THROWS_AS(parse_grid(std::vector<std::string>{}), ConfigError);
  CHECK_THROWS_AS(parse_grid(std::vector<std::string>{"lambda="}), ConfigError);
  CHECK_THROWS_AS(parse_grid(std::vector<std::string>{"nonsense=1"}), ConfigError);
  CHECK_THROWS_AS(parse_grid(std::vector<std::string>{"lambda=1", "reg.lambda=2"}), ConfigError);
}

TEST_CASE("sweep: 3x3 grid over two seeds, last axis fastest") {
  ConfigMap cfg = short_run();
  cfg["reg.kind"] = "sgnn";
  const auto grid = parse_grid(std::vector<std::string>{"lambda=0.5,1,2", "tcut=0.3,0.6931471805599453,1"});
  const std::vector<std::uint64_t> seeds{1, 2};
  const auto rows = run_sweep(sbm(), cfg, grid, seeds, 4);
  REQUIRE(rows.size() == 18);
  CHECK(rows[0].point == std::vector<std::string>{"0.5", "0.3"});
  CHECK(rows[0].seed == 1);
  CHECK(rows[1].seed == 2);
  CHECK(rows[2].point == std::vector<std::string>{"0.5", "0.6931471805599453"});
  CHECK(rows[17].point == std::vector<std::string>{"2", "1"});
  // lambda = 1, t_cut = ln 2: half the nodes active on average
  for (const auto& r : rows)
    if (r.point[0] == "1" && r.point[1] == "0.6931471805599453")
      CHECK(std::abs(r.active_frac - 0.5) < 0.03);

  // thread count does not change the result
  const auto serial = run_sweep(sbm(), cfg, grid, seeds, 1);
  CHECK(sweep_csv(grid, serial) == sweep_csv(grid, rows));

  const auto best = best_point(grid, rows);
  double manual = -1.0;
  for (std::size_t i = 0; i < rows.size(); i += 2)
    manual = std::max(manual, (rows[i].val_acc + rows[i + 1].val_acc) / 2);
  CHECK(best.mean_val == manual);
  const std::string csv = sweep_csv(grid, rows);
  CHECK(csv.substr(0, csv.find('\n')) == "reg.lambda,reg.t_cut,seed,val_acc,test_acc,active_frac");
}

TEST_CASE("a one-point sweep equals a plain training run") {
  ConfigMap cfg = short_run();
  cfg["reg.kind"] = "dropout";
  cfg["seed"] = "3";
  const auto grid = parse_grid(std::vector<std::string>{"p=0.5"});
  const std::vector<std::uint64_t> seeds{3};
  const auto rows = run_sweep(sbm(), cfg, grid, seeds, 2);
  const RunRecord rec = train(sbm().graph, to_train_config(cfg));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].val_acc == rec.final_val);
  CHECK(rows[0].test_acc == rec.final_test);
}

TEST_CASE("compare: one row per method, deterministic across thread counts") {
  const ConfigMap cfg = short_run();
  const std::vector<RegKind> methods{RegKind::dropout, RegKind::drop_edge, RegKind::drop_node,
                                     RegKind::sgnn};
  const std::vector<std::uint64_t> seeds{1, 2};
  const std::vector<DatasetBundle> data{sbm()};
  const auto a = run_compare(data, cfg, methods, seeds, 4);
  const auto b = run_compare(data, cfg, methods, seeds, 1);
  CHECK(compare_csv(a) == compare_csv(b));
  const std::string table = format_compare_table(a);
  CHECK(std::count(table.begin(), table.end(), '\n') == 2 + 4);
  CHECK(table.find("| sgnn |") != std::string::npos);
  CHECK(table.find("sbm_3x100 Test") != std::string::npos);
  CHECK(table.find(" ± ") != std::string::npos);
  // a compare cell is the same number a direct run produces
  ConfigMap one = cfg;
  one["reg.kind"] = "drop_node";
  one["seed"] = "2";
  CHECK(a.test[0][2][1] == train(sbm().graph, to_train_config(one)).final_test);
}

TEST_CASE("loglog_slope") {
  std::vector<BenchPoint> pts;
  for (std::size_t n : {10u, 100u, 1000u, 10000u}) pts.push_back({n, 3e-9 * std::pow(n, 1.1)});
  CHECK(loglog_slope(pts) == doctest::Approx(1.1).epsilon(1e-12));
  pts.push_back({0, 1.0});  // ignored
  CHECK(loglog_slope(pts) == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(loglog_slope(std::vector<BenchPoint>{{5, 1.0}}) == 0.0);
}

TEST_CASE("bench_clocks handles tiny and empty sizes") {
  const std::vector<std::size_t> sizes{0, 1000, 4000};
  const auto report = bench_clocks(sizes, 1.0, 1);
  REQUIRE(report.points.size() == 3);
  CHECK(report.points[0].n == 0);
  CHECK(report.points[2].seconds > 0.0);
  CHECK(bench_report_text(report).find("# fitted exponent") != std::string::npos);
}
