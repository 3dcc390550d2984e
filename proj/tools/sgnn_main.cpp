// sgnn command-line front end: train, compare, sweep, bench-clocks, gen-sbm,
// validate-data. Exit codes: 0 ok, 1 usage/config, 2 data, 3 numeric fault.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "sgnn/dataset.hpp"
#include "sgnn/errors.hpp"
#include "sgnn/experiment.hpp"
#include "sgnn/sbm.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

// Flag values captured for one subcommand; only flags actually given
// become overrides.
struct ConfigFlags {
  std::map<std::string, std::string> storage;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  std::string config_file;

  void attach(CLI::App* cmd, bool with_data) {
    for (const auto& k : sgnn::config_keys()) {
      const std::string key(k.key);
      if (!with_data && (key == "data.path" || key == "data.synthetic")) continue;
      auto* opt = cmd->add_option("--" + std::string(k.flag), storage[key],
                                  std::string(k.help) + " [" + key +
                                      (k.default_value.empty() ? std::string()
                                                               : "=" + std::string(k.default_value)) +
                                      "]");
      options.emplace_back(key, opt);
    }
    cmd->add_option("--config", config_file, "key=value config or manifest file");
  }

  sgnn::ConfigMap resolve() const {
    sgnn::ConfigMap cfg = sgnn::default_config();
    if (!config_file.empty()) cfg = sgnn::merge_config(cfg, sgnn::read_config_file(config_file));
    sgnn::ConfigMap overrides;
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) overrides[key] = storage.at(key);
    return sgnn::merge_config(cfg, overrides);
  }
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sgnn::DataError("cannot write '" + path.string() + "'");
  out << text;
}

void print_warnings(const sgnn::DatasetBundle& data) {
  for (const auto& w : data.warnings) std::cerr << "warning: " << data.name << ": " << w << "\n";
}

int cmd_train(const ConfigFlags& flags, const fs::path& out_dir) {
  const sgnn::ConfigMap cfg = flags.resolve();
  const sgnn::TrainConfig tc = sgnn::to_train_config(cfg);
  const sgnn::DatasetBundle data = sgnn::load_configured_data(cfg);
  print_warnings(data);
  const sgnn::RunRecord rec = sgnn::train(data.graph, tc);
  fs::create_directories(out_dir);
  write_file(out_dir / "run.csv", sgnn::run_csv(rec));
  const std::vector<std::uint64_t> seeds{tc.seed};
  write_file(out_dir / "manifest.txt", sgnn::manifest_text("train", cfg, data, seeds));
  std::cout << "steps=" << rec.steps << " skipped=" << rec.skipped_steps
            << " final_val=" << rec.final_val << " final_test=" << rec.final_test
            << " mean_active_frac=" << rec.mean_active_frac << "\n";
  return 0;
}

int cmd_compare(const ConfigFlags& flags, const std::vector<std::string>& paths,
                const std::vector<std::string>& synthetic, const std::string& methods_text,
                const std::string& seeds_text, const fs::path& out_dir) {
  sgnn::ConfigMap cfg = flags.resolve();
  std::vector<sgnn::DatasetBundle> datasets;
  for (const auto& p : paths) {
    sgnn::ConfigMap c = cfg;
    c["data.path"] = p;
    c["data.synthetic"] = "";
    datasets.push_back(sgnn::load_configured_data(c));
  }
  for (const auto& s : synthetic) {
    sgnn::ConfigMap c = cfg;
    c["data.path"] = "";
    c["data.synthetic"] = s;
    datasets.push_back(sgnn::load_configured_data(c));
  }
  if (datasets.empty()) throw sgnn::ConfigError("compare needs at least one --data or --synthetic");
  for (const auto& d : datasets) print_warnings(d);

  std::vector<sgnn::RegKind> methods;
  std::string_view rest = methods_text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    methods.push_back(sgnn::parse_reg_kind(rest.substr(0, comma)));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  const auto seeds = sgnn::parse_seed_list(seeds_text);
  const auto result = sgnn::run_compare(datasets, cfg, methods, seeds, sgnn::worker_threads());
  const std::string table = sgnn::format_compare_table(result);
  fs::create_directories(out_dir);
  write_file(out_dir / "compare.csv", sgnn::compare_csv(result));
  write_file(out_dir / "table.md", table);
  std::string manifest;
  for (const auto& d : datasets) {
    sgnn::ConfigMap c = cfg;
    c["reg.kind"] = methods_text;
    manifest += sgnn::manifest_text("compare", c, d, seeds);
  }
  write_file(out_dir / "manifest.txt", manifest);
  std::cout << table;
  return 0;
}

int cmd_sweep(const ConfigFlags& flags, const std::vector<std::string>& grid_tokens,
              const std::string& seeds_text, const fs::path& out_dir) {
  const sgnn::ConfigMap cfg = flags.resolve();
  const auto grid = sgnn::parse_grid(grid_tokens);
  const auto seeds = sgnn::parse_seed_list(seeds_text);
  sgnn::to_train_config(cfg);
  const sgnn::DatasetBundle data = sgnn::load_configured_data(cfg);
  print_warnings(data);
  const auto rows = sgnn::run_sweep(data, cfg, grid, seeds, sgnn::worker_threads());
  const auto best = sgnn::best_point(grid, rows);
  fs::create_directories(out_dir);
  write_file(out_dir / "sweep.csv", sgnn::sweep_csv(grid, rows));
  std::string manifest = sgnn::manifest_text("sweep", cfg, data, seeds);
  for (const auto& axis : grid) {
    manifest += "grid." + axis.key + "=";
    for (std::size_t i = 0; i < axis.values.size(); ++i) manifest += (i ? "," : "") + axis.values[i];
    manifest += "\n";
  }
  write_file(out_dir / "manifest.txt", manifest);
  std::cout << "rows=" << rows.size() << "\nbest:";
  for (std::size_t a = 0; a < grid.size(); ++a) std::cout << " " << grid[a].key << "=" << best.best_point[a];
  std::cout << " mean_val=" << best.mean_val << " mean_test=" << best.mean_test << "\n";
  return 0;
}

int cmd_bench(const std::vector<std::size_t>& sizes, double lambda, std::uint64_t seed,
              const std::string& out_file) {
  const auto report = sgnn::bench_clocks(sizes, lambda, seed);
  const std::string text = sgnn::bench_report_text(report);
  if (!out_file.empty()) write_file(out_file, text);
  std::cout << text;
  return 0;
}

int cmd_gen_sbm(const std::string& spec, std::uint64_t seed, const fs::path& out) {
  const auto bundle = sgnn::generate_sbm(sgnn::parse_sbm_spec(spec, seed));
  sgnn::save_dataset(bundle, out);
  std::cout << "wrote " << out.string() << " nodes=" << bundle.graph.num_nodes()
            << " edges=" << bundle.graph.num_edges() << " checksum=" << bundle.provenance.checksum
            << "\n";
  return 0;
}

int cmd_validate(const fs::path& path) {
  const auto bundle = sgnn::load_dataset(path);
  print_warnings(bundle);
  const auto& g = bundle.graph;
  std::cout << "name=" << bundle.name << "\nnodes=" << g.num_nodes() << "\nedges=" << g.num_edges();
  if (bundle.provenance.directed_edges)
    std::cout << "\ndirected_edges=" << *bundle.provenance.directed_edges;
  std::cout << "\nclasses=" << g.num_classes() << "\nfeatures=" << g.feature_dim()
            << "\ntrain=" << g.train_mask().count() << "\nval=" << g.val_mask().count()
            << "\ntest=" << g.test_mask().count() << "\nchecksum=" << bundle.provenance.checksum
            << "\nstatus=ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson-clock GNN training engine"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "train one model and write run.csv + manifest.txt");
  ConfigFlags train_flags;
  train_flags.attach(train, true);
  std::string train_out = "sgnn_out";
  train->add_option("--out", train_out, "output directory");

  auto* compare = app.add_subcommand("compare", "methods x seeds comparison table");
  ConfigFlags compare_flags;
  compare_flags.attach(compare, false);
  std::vector<std::string> compare_paths, compare_synth;
  std::string compare_methods = "dropout,drop_edge,drop_node,sgnn";
  std::string compare_seeds = "1,2,3,4,5";
  std::string compare_out = "sgnn_compare";
  compare->add_option("--data", compare_paths, "dataset file (repeatable)");
  compare->add_option("--synthetic", compare_synth, "synthetic spec (repeatable)");
  compare->add_option("--methods", compare_methods, "comma-separated regularizers");
  compare->add_option("--seeds", compare_seeds, "comma-separated seeds");
  compare->add_option("--out", compare_out, "output directory");

  auto* sweep = app.add_subcommand("sweep", "grid search over config keys");
  ConfigFlags sweep_flags;
  sweep_flags.attach(sweep, true);
  std::vector<std::string> grid_tokens;
  std::string sweep_seeds = "1,2,3,4,5";
  std::string sweep_out = "sgnn_sweep";
  sweep->add_option("--grid", grid_tokens, "axes like lambda=0.5,1,2 tcut=0.3,0.7")->required();
  sweep->add_option("--seeds", sweep_seeds, "comma-separated seeds");
  sweep->add_option("--out", sweep_out, "output directory");

  auto* bench = app.add_subcommand("bench-clocks", "time one clock step against node count");
  std::vector<std::size_t> sizes{10'000, 30'000, 100'000, 300'000, 1'000'000, 3'000'000,
                                 10'000'000};
  double bench_lambda = 1.0;
  std::uint64_t bench_seed = 1;
  std::string bench_out;
  bench->add_option("--sizes", sizes, "node counts")->delimiter(',');
  bench->add_option("--lambda", bench_lambda, "clock rate");
  bench->add_option("--seed", bench_seed, "seed");
  bench->add_option("--out", bench_out, "also write the report to this file");

  auto* gen = app.add_subcommand("gen-sbm", "write a synthetic SBM dataset file");
  std::string gen_spec = "sbm:3x100";
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--spec", gen_spec, "sbm:BxN[,p_in=..,p_out=..,dim=..,noise=..,train=..,val=..]");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output file")->required();

  auto* validate = app.add_subcommand("validate-data", "load and validate a dataset file");
  std::string validate_path;
  validate->add_option("--data", validate_path, "dataset file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (train->parsed()) return cmd_train(train_flags, train_out);
    if (compare->parsed())
      return cmd_compare(compare_flags, compare_paths, compare_synth, compare_methods,
                         compare_seeds, compare_out);
    if (sweep->parsed()) return cmd_sweep(sweep_flags, grid_tokens, sweep_seeds, sweep_out);
    if (bench->parsed()) return cmd_bench(sizes, bench_lambda, bench_seed, bench_out);
    if (gen->parsed()) return cmd_gen_sbm(gen_spec, gen_seed, gen_out);
    if (validate->parsed()) return cmd_validate(validate_path);
  } catch (const sgnn::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const sgnn::NumericFault& e) {
    std::cerr << "numeric fault: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
