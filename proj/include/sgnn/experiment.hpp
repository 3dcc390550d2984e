#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgnn/dataset.hpp"
#include "sgnn/regularizers.hpp"
#include "sgnn/trainer.hpp"

namespace sgnn {

// Version of the run.csv / sweep.csv / compare.csv layouts, recorded in
// every manifest.
inline constexpr int kCsvSchemaVersion = 1;

// Fully-qualified config keys ("reg.lambda", "train.epochs", ...) to values.
using ConfigMap = std::map<std::string, std::string>;

struct ConfigKey {
  std::string_view key;
  std::string_view flag;  // CLI long flag without dashes
  std::string_view default_value;
  std::string_view help;
};

// Every config key with its flag spelling and default.
std::span<const ConfigKey> config_keys();
ConfigMap default_config();
// Reads key=value lines; '#' starts a comment line. Keys outside
// config_keys() are ignored except dataset.checksum, which is kept so a
// reproduced run can verify its input.
ConfigMap read_config_file(const std::filesystem::path& path);
ConfigMap parse_config_text(std::string_view text);
// Later maps win. Throws ConfigError for unknown keys in `overrides`.
ConfigMap merge_config(ConfigMap base, const ConfigMap& overrides);

TrainConfig to_train_config(const ConfigMap& cfg);
// The dataset named by data.path or data.synthetic (+ data.seed). When the
// map carries dataset.checksum, the loaded data must hash to it.
DatasetBundle load_configured_data(const ConfigMap& cfg);

std::string run_csv(const RunRecord& record);
// Manifest: schema fields, command, every resolved config key, dataset identity.
std::string manifest_text(std::string_view command, const ConfigMap& cfg,
                          const DatasetBundle& data, std::span<const std::uint64_t> seeds);

std::vector<std::uint64_t> parse_seed_list(std::string_view text);
std::size_t worker_threads();  // hardware threads capped by SGNN_THREADS

// Runs jobs [0, count) on up to `threads` workers; job(i) must only touch slot i.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& job);

// --- compare ---------------------------------------------------------------

struct CellStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for one seed
};
CellStats summarize(std::span<const double> values);

struct CompareResult {
  std::vector<std::string> datasets;
  std::vector<RegKind> methods;
  std::vector<std::uint64_t> seeds;
  // [dataset][method] -> per-seed final accuracies, in seed order.
  std::vector<std::vector<std::vector<double>>> val;
  std::vector<std::vector<std::vector<double>>> test;
};

CompareResult run_compare(std::span<const DatasetBundle> datasets, const ConfigMap& base,
                          std::span<const RegKind> methods, std::span<const std::uint64_t> seeds,
                          std::size_t threads);
// Method rows x (<dataset> Val, <dataset> Test) columns, cells "mean ± std".
std::string format_compare_table(const CompareResult& result);
std::string compare_csv(const CompareResult& result);

// --- sweep -----------------------------------------------------------------

struct GridAxis {
  std::string key;  // fully-qualified config key
  std::vector<std::string> values;
};

// Tokens like "lambda=0.5,1,2" or "reg.t_cut=0.3,0.7". Throws ConfigError
// on an empty grid or an axis without values.
std::vector<GridAxis> parse_grid(std::span<const std::string> tokens);

struct SweepRow {
  std::vector<std::string> point;  // one value per axis
  std::uint64_t seed = 0;
  double val_acc = 0.0;
  double test_acc = 0.0;
  double active_frac = 0.0;
};

struct SweepSummary {
  std::vector<std::string> best_point;
  double mean_val = 0.0;
  double mean_test = 0.0;
};

// Rows ordered by grid point (axes vary last-fastest), then seed.
std::vector<SweepRow> run_sweep(const DatasetBundle& data, const ConfigMap& base,
                                std::span<const GridAxis> grid,
                                std::span<const std::uint64_t> seeds, std::size_t threads);
SweepSummary best_point(std::span<const GridAxis> grid, std::span<const SweepRow> rows);
std::string sweep_csv(std::span<const GridAxis> grid, std::span<const SweepRow> rows);

// --- bench-clocks ------------------------------------------------------------

struct BenchPoint {
  std::size_t n = 0;
  double seconds = 0.0;  // one init_clocks + active_set + resample_fired step
};

struct BenchReport {
  std::vector<BenchPoint> points;
  double exponent = 0.0;  // least-squares slope of log(seconds) on log(n), n > 0
};

BenchReport bench_clocks(std::span<const std::size_t> sizes, double lambda, std::uint64_t seed);
double loglog_slope(std::span<const BenchPoint> points);
std::string bench_report_text(const BenchReport& report);

}  // namespace sgnn
