#include "sgnn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "sgnn/errors.hpp"
#include "sgnn/poisson_clock.hpp"
#include "sgnn/sbm.hpp"

namespace sgnn {

namespace {

constexpr ConfigKey kKeys[] = {
    {"data.path", "data", "", "dataset file in sgnn-graph-v1 format"},
    {"data.synthetic", "synthetic", "", "synthetic dataset spec, e.g. sbm:3x100"},
    {"data.seed", "data-seed", "1", "seed for synthetic dataset generation"},
    {"seed", "seed", "1", "run seed (weights, plans, clocks)"},
    {"reg.kind", "reg", "none", "none|dropout|drop_edge|drop_node|sgnn"},
    {"reg.p", "p", "0.5", "drop probability for dropout/drop_edge/drop_node"},
    {"reg.lambda", "lambda", "1", "Poisson clock rate"},
    {"reg.t_cut", "tcut", "0.7", "sgnn activation cutoff time"},
    {"reg.rate_mode", "rate-mode", "uniform", "uniform|degree per-node rates"},
    {"reg.renormalize_subgraph", "renormalize-subgraph", "false",
     "recompute degrees inside induced subgraphs"},
    {"model.hidden", "hidden", "16", "hidden layer width"},
    {"model.bias", "bias", "true", "use layer biases"},
    {"opt.lr", "lr", "0.01", "Adam learning rate"},
    {"opt.weight_decay", "weight-decay", "0.0005", "L2 penalty on the first layer"},
    {"train.regime", "regime", "epoch", "epoch|poisson_dynamic"},
    {"train.epochs", "epochs", "200", "epochs for the epoch regime"},
    {"train.T", "T", "200", "total clock time for the dynamic regime"},
    {"train.dt", "dt", "1", "clock time step for the dynamic regime"},
    {"train.clock_reset", "clock-reset", "renewal", "renewal|fresh clock renewal"},
    {"train.select", "select", "final", "final|best_val reported accuracy"},
    {"eval.every", "eval-every", "1", "evaluate every k steps"},
    {"output.timing", "timing", "false", "fill the ms column with wall-clock times"},
};

constexpr std::string_view kChecksumKey = "dataset.checksum";

bool is_config_key(std::string_view key) {
  return std::any_of(std::begin(kKeys), std::end(kKeys),
                     [key](const ConfigKey& k) { return k.key == key; });
}

const std::string& get(const ConfigMap& cfg, const std::string& key) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

double get_double(const ConfigMap& cfg, const std::string& key) {
  const std::string& s = get(cfg, key);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError(key + ": expected a number, got '" + s + "'");
  return v;
}

std::uint64_t get_uint(const ConfigMap& cfg, const std::string& key) {
  const std::string& s = get(cfg, key);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError(key + ": expected a non-negative integer, got '" + s + "'");
  return v;
}

bool get_bool(const ConfigMap& cfg, const std::string& key) {
  const std::string& s = get(cfg, key);
  if (s == "true" || s == "1" || s == "on") return true;
  if (s == "false" || s == "0" || s == "off") return false;
  throw ConfigError(key + ": expected true/false, got '" + s + "'");
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string resolve_axis_key(std::string_view name) {
  if (is_config_key(name)) return std::string(name);
  for (const auto& k : kKeys)
    if (k.flag == name) return std::string(k.key);
  throw ConfigError("grid axis '" + std::string(name) + "' is not a config key or flag");
}

}  // namespace

std::span<const ConfigKey> config_keys() { return kKeys; }

ConfigMap default_config() {
  ConfigMap cfg;
  for (const auto& k : kKeys) cfg.emplace(k.key, k.default_value);
  return cfg;
}

ConfigMap parse_config_text(std::string_view text) {
  ConfigMap out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (is_config_key(key) || key == kChecksumKey) out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

ConfigMap read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

ConfigMap merge_config(ConfigMap base, const ConfigMap& overrides) {
  for (const auto& [key, value] : overrides) {
    if (!is_config_key(key) && key != kChecksumKey)
      throw ConfigError("unknown config key '" + key + "'");
    base[key] = value;
  }
  return base;
}

TrainConfig to_train_config(const ConfigMap& cfg) {
  TrainConfig tc;
  tc.seed = get_uint(cfg, "seed");
  tc.reg.kind = parse_reg_kind(get(cfg, "reg.kind"));
  tc.reg.p = get_double(cfg, "reg.p");
  tc.reg.lambda = get_double(cfg, "reg.lambda");
  tc.reg.t_cut = get_double(cfg, "reg.t_cut");
  tc.reg.rate_mode = parse_rate_mode(get(cfg, "reg.rate_mode"));
  tc.reg.renormalize_subgraph = get_bool(cfg, "reg.renormalize_subgraph");
  tc.model.hidden = get_uint(cfg, "model.hidden");
  tc.model.bias = get_bool(cfg, "model.bias");
  tc.opt.lr = get_double(cfg, "opt.lr");
  tc.opt.weight_decay = get_double(cfg, "opt.weight_decay");
  tc.regime = parse_regime(get(cfg, "train.regime"));
  tc.epochs = get_uint(cfg, "train.epochs");
  tc.total_time = get_double(cfg, "train.T");
  tc.dt = get_double(cfg, "train.dt");
  tc.clock_reset = parse_clock_reset(get(cfg, "train.clock_reset"));
  const std::string& select = get(cfg, "train.select");
  if (select != "final" && select != "best_val")
    throw ConfigError("train.select must be final or best_val");
  tc.select_best_val = select == "best_val";
  tc.eval_every = get_uint(cfg, "eval.every");
  tc.record_time = get_bool(cfg, "output.timing");
  tc.validate();
  return tc;
}

DatasetBundle load_configured_data(const ConfigMap& cfg) {
  const std::string& path = get(cfg, "data.path");
  const std::string& synthetic = get(cfg, "data.synthetic");
  if (path.empty() == synthetic.empty())
    throw ConfigError("exactly one of --data and --synthetic must be given");
  DatasetBundle bundle = path.empty()
                             ? generate_sbm(parse_sbm_spec(synthetic, get_uint(cfg, "data.seed")))
                             : load_dataset(path);
  const auto it = cfg.find(std::string(kChecksumKey));
  if (it != cfg.end() && !it->second.empty() && it->second != bundle.provenance.checksum)
    throw ChecksumMismatchError("dataset checksum " + bundle.provenance.checksum +
                                " does not match the manifest's " + it->second);
  return bundle;
}

std::string run_csv(const RunRecord& record) {
  std::string out = "step,t,loss,val_acc,test_acc,active_frac,ms\n";
  for (const auto& r : record.rows) {
    out += std::to_string(r.step);
    out += ',' + fmt("%.10g", r.t);
    out += ',' + (std::isnan(r.loss) ? std::string("nan") : fmt("%.10g", r.loss));
    out += ',' + fmt("%.6f", r.val_acc);
    out += ',' + fmt("%.6f", r.test_acc);
    out += ',' + fmt("%.6f", r.active_frac);
    out += ',' + fmt("%.3f", r.ms);
    out += '\n';
  }
  return out;
}

std::string manifest_text(std::string_view command, const ConfigMap& cfg,
                          const DatasetBundle& data, std::span<const std::uint64_t> seeds) {
  std::string out;
  out += "# sgnn run manifest\n";
  out += "manifest_version=1\n";
  out += "csv_schema=" + std::to_string(kCsvSchemaVersion) + "\n";
  out += "command=" + std::string(command) + "\n";
  for (const auto& [key, value] : cfg)
    if (key != kChecksumKey) out += key + "=" + value + "\n";
  out += "dataset.name=" + data.name + "\n";
  out += std::string(kChecksumKey) + "=" + data.provenance.checksum + "\n";
  out += "seeds=";
  for (std::size_t i = 0; i < seeds.size(); ++i) out += (i ? "," : "") + std::to_string(seeds[i]);
  out += "\n";
  return out;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string tok = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (tok.empty()) continue;
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw ConfigError("bad seed '" + tok + "'");
    seeds.push_back(v);
  }
  if (seeds.empty()) throw ConfigError("seed list is empty");
  return seeds;
}

std::size_t worker_threads() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SGNN_THREADS")) {
    std::size_t cap = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), cap);
    if (ec == std::errc() && ptr == s.data() + s.size() && cap > 0) n = std::min(n, cap);
  }
  return n;
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& job) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            job(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
  }
  // Rethrow the lowest-index failure so error reporting is deterministic.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

CellStats summarize(std::span<const double> values) {
  CellStats s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

CompareResult run_compare(std::span<const DatasetBundle> datasets, const ConfigMap& base,
                          std::span<const RegKind> methods, std::span<const std::uint64_t> seeds,
                          std::size_t threads) {
  CompareResult result;
  for (const auto& d : datasets) result.datasets.push_back(d.name);
  result.methods.assign(methods.begin(), methods.end());
  result.seeds.assign(seeds.begin(), seeds.end());
  const std::size_t nd = datasets.size(), nm = methods.size(), ns = seeds.size();
  result.val.assign(nd, std::vector<std::vector<double>>(nm, std::vector<double>(ns)));
  result.test = result.val;

  std::vector<TrainConfig> configs;
  for (std::size_t m = 0; m < nm; ++m)
    for (std::size_t s = 0; s < ns; ++s) {
      ConfigMap cfg = base;
      cfg["reg.kind"] = std::string(to_string(methods[m]));
      cfg["seed"] = std::to_string(seeds[s]);
      configs.push_back(to_train_config(cfg));
    }

  parallel_for(nd * nm * ns, threads, [&](std::size_t job) {
    const std::size_t d = job / (nm * ns);
    const std::size_t m = (job / ns) % nm;
    const std::size_t s = job % ns;
    const RunRecord rec = train(datasets[d].graph, configs[m * ns + s]);
    result.val[d][m][s] = rec.final_val;
    result.test[d][m][s] = rec.final_test;
  });
  return result;
}

std::string format_compare_table(const CompareResult& r) {
  std::string out = "| Method |";
  std::string rule = "|---|";
  for (const auto& d : r.datasets) {
    out += " " + d + " Val | " + d + " Test |";
    rule += "---|---|";
  }
  out += "\n" + rule + "\n";
  for (std::size_t m = 0; m < r.methods.size(); ++m) {
    out += "| " + std::string(to_string(r.methods[m])) + " |";
    for (std::size_t d = 0; d < r.datasets.size(); ++d) {
      for (const auto* table : {&r.val, &r.test}) {
        const CellStats s = summarize((*table)[d][m]);
        out += " " + fmt("%.4f", s.mean) + " ± " + fmt("%.4f", s.stddev) + " |";
      }
    }
    out += "\n";
  }
  return out;
}

std::string compare_csv(const CompareResult& r) {
  std::string out = "dataset,method,seed,val_acc,test_acc\n";
  for (std::size_t d = 0; d < r.datasets.size(); ++d)
    for (std::size_t m = 0; m < r.methods.size(); ++m)
      for (std::size_t s = 0; s < r.seeds.size(); ++s)
        out += r.datasets[d] + "," + std::string(to_string(r.methods[m])) + "," +
               std::to_string(r.seeds[s]) + "," + fmt("%.6f", r.val[d][m][s]) + "," +
               fmt("%.6f", r.test[d][m][s]) + "\n";
  return out;
}

std::vector<GridAxis> parse_grid(std::span<const std::string> tokens) {
  std::vector<GridAxis> grid;
  for (const auto& tok : tokens) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError("grid token '" + tok + "' is not key=v1,v2");
    GridAxis axis;
    axis.key = resolve_axis_key(trim(std::string_view(tok).substr(0, eq)));
    std::string_view rest = std::string_view(tok).substr(eq + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string v = trim(rest.substr(0, comma));
      if (!v.empty()) axis.values.push_back(v);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    if (axis.values.empty()) throw ConfigError("grid axis '" + axis.key + "' has no values");
    for (const auto& other : grid)
      if (other.key == axis.key) throw ConfigError("grid axis '" + axis.key + "' repeated");
    grid.push_back(std::move(axis));
  }
  if (grid.empty()) throw ConfigError("empty grid");
  return grid;
}

std::vector<SweepRow> run_sweep(const DatasetBundle& data, const ConfigMap& base,
                                std::span<const GridAxis> grid,
                                std::span<const std::uint64_t> seeds, std::size_t threads) {
  if (grid.empty()) throw ConfigError("empty grid");
  std::size_t points = 1;
  for (const auto& axis : grid) points *= axis.values.size();

  std::vector<SweepRow> rows(points * seeds.size());
  std::vector<TrainConfig> configs(rows.size());
  for (std::size_t p = 0; p < points; ++p) {
    std::vector<std::string> point(grid.size());
    std::size_t rem = p;
    for (std::size_t a = grid.size(); a-- > 0;) {
      point[a] = grid[a].values[rem % grid[a].values.size()];
      rem /= grid[a].values.size();
    }
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      ConfigMap cfg = base;
      for (std::size_t a = 0; a < grid.size(); ++a) cfg[grid[a].key] = point[a];
      cfg["seed"] = std::to_string(seeds[s]);
      const std::size_t i = p * seeds.size() + s;
      configs[i] = to_train_config(cfg);
      rows[i].point = point;
      rows[i].seed = seeds[s];
    }
  }
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    const RunRecord rec = train(data.graph, configs[i]);
    rows[i].val_acc = rec.final_val;
    rows[i].test_acc = rec.final_test;
    rows[i].active_frac = rec.mean_active_frac;
  });
  return rows;
}

SweepSummary best_point(std::span<const GridAxis> grid, std::span<const SweepRow> rows) {
  (void)grid;
  SweepSummary best;
  bool have = false;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    double val = 0.0, test = 0.0;
    while (j < rows.size() && rows[j].point == rows[i].point) {
      val += rows[j].val_acc;
      test += rows[j].test_acc;
      ++j;
    }
    const double k = static_cast<double>(j - i);
    if (!have || val / k > best.mean_val) {
      best = SweepSummary{rows[i].point, val / k, test / k};
      have = true;
    }
    i = j;
  }
  return best;
}

std::string sweep_csv(std::span<const GridAxis> grid, std::span<const SweepRow> rows) {
  std::string out;
  for (const auto& axis : grid) out += axis.key + ",";
  out += "seed,val_acc,test_acc,active_frac\n";
  for (const auto& r : rows) {
    for (const auto& v : r.point) out += v + ",";
    out += std::to_string(r.seed) + "," + fmt("%.6f", r.val_acc) + "," + fmt("%.6f", r.test_acc) +
           "," + fmt("%.6f", r.active_frac) + "\n";
  }
  return out;
}

BenchReport bench_clocks(std::span<const std::size_t> sizes, double lambda, std::uint64_t seed) {
  using Clock = std::chrono::steady_clock;
  constexpr std::size_t kWorkPerTrial = 2'000'000;  // node-steps per timed trial
  constexpr int kTrials = 3;
  BenchReport report;
  for (std::size_t n : sizes) {
    const std::size_t iters = std::max<std::size_t>(1, kWorkPerTrial / std::max<std::size_t>(n, 1));
    const std::vector<double> rates(n, lambda);
    double best = std::numeric_limits<double>::infinity();
    volatile std::size_t sink = 0;
    for (int trial = 0; trial < kTrials; ++trial) {
      const auto start = Clock::now();
      for (std::size_t it = 0; it < iters; ++it) {
        ClockState clocks = init_clocks(n, rates, seed + it);
        const NodeMask active = active_set(clocks, 1.0 / lambda);
        resample_fired(clocks, active);
        sink = sink + active.count();
      }
      const double secs = std::chrono::duration<double>(Clock::now() - start).count();
      best = std::min(best, secs / static_cast<double>(iters));
    }
    report.points.push_back({n, best});
  }
  report.exponent = loglog_slope(report.points);
  return report;
}

double loglog_slope(std::span<const BenchPoint> points) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t k = 0;
  for (const auto& p : points) {
    if (p.n == 0 || !(p.seconds > 0.0)) continue;
    const double x = std::log(static_cast<double>(p.n));
    const double y = std::log(p.seconds);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  if (k < 2) return 0.0;
  const double kk = static_cast<double>(k);
  return (kk * sxy - sx * sy) / (kk * sxx - sx * sx);
}

std::string bench_report_text(const BenchReport& report) {
  std::string out = "n,seconds_per_step\n";
  for (const auto& p : report.points)
    out += std::to_string(p.n) + "," + fmt("%.6e", p.seconds) + "\n";
  out += "# fitted exponent " + fmt("%.4f", report.exponent) + "\n";
  return out;
}

}  // namespace sgnn
