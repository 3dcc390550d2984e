#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "sgnn/gcn.hpp"
#include "sgnn/graph.hpp"
#include "sgnn/optimizer.hpp"
#include "sgnn/poisson_clock.hpp"
#include "sgnn/regularizers.hpp"

namespace sgnn {

enum class Regime { epoch, poisson_dynamic };

// How a fired clock is renewed in the dynamic regime.
//   renewal: T_v <- T_v + Exp(lambda_v)   (clock persists, events queue up)
//   fresh:   T_v <- t + Exp(lambda_v)     (restart from the current time)
enum class ClockReset { renewal, fresh };

std::string_view to_string(Regime regime);
Regime parse_regime(std::string_view name);
std::string_view to_string(ClockReset reset);
ClockReset parse_clock_reset(std::string_view name);

struct TrainConfig {
  Regime regime = Regime::epoch;
  RegularizerConfig reg;
  GcnConfig model;
  AdamConfig opt;
  std::size_t epochs = 200;
  // Dynamic regime: total time T and step dt; clock rates come from reg.lambda
  // and reg.rate_mode.
  double total_time = 200.0;
  double dt = 1.0;
  ClockReset clock_reset = ClockReset::renewal;
  std::size_t eval_every = 1;
  std::uint64_t seed = 1;
  // Report the best-validation evaluation point instead of the last one.
  bool select_best_val = false;
  // Fill the ms column with wall-clock step times. Off keeps output bit-stable.
  bool record_time = false;

  void validate() const;  // throws ConfigError
};

// Number of optimizer steps the schedule performs: epochs, or ceil(T / dt).
std::size_t scheduled_steps(const TrainConfig& cfg);

struct RunRow {
  std::size_t step = 0;  // 1-based optimizer step
  double t = 0.0;        // epoch index, or clock time at the step
  double loss = 0.0;     // NaN when the step was skipped
  double val_acc = 0.0;
  double test_acc = 0.0;
  double active_frac = 1.0;
  double ms = 0.0;
};

struct RunRecord {
  std::vector<RunRow> rows;  // one per evaluation point
  std::size_t steps = 0;
  std::size_t skipped_steps = 0;
  double final_val = 0.0;
  double final_test = 0.0;
  double mean_active_frac = 0.0;  // over all steps, skipped ones included
  Model model;
};

// Clock-driven subgraph schedule: each call to step() yields
// V_t = {v : T_v <= t}, renews the fired clocks and advances t by dt.
class DynamicSchedule {
 public:
  DynamicSchedule(std::vector<double> rates, double total_time, double dt, ClockReset reset,
                  std::uint64_t seed);

  std::size_t total_steps() const noexcept { return total_steps_; }
  std::size_t steps_taken() const noexcept { return taken_; }
  bool done() const noexcept { return taken_ >= total_steps_; }
  double time() const noexcept { return static_cast<double>(taken_) * dt_; }
  const ClockState& clocks() const noexcept { return clocks_; }

  NodeMask step();

 private:
  ClockState clocks_;
  double dt_;
  ClockReset reset_;
  std::size_t total_steps_;
  std::size_t taken_ = 0;
};

// Argmax accuracy over `mask`; ties go to the lowest class index.
// Throws EmptyMaskError for an empty mask.
double accuracy(const Matrix& logits, std::span<const std::int32_t> labels, const NodeMask& mask);

// Full-graph, plan-free accuracy.
double evaluate(const Model& model, const Graph& g, const NormalizedAdjacency& adj,
                const NodeMask& mask);

RunRecord train_epoch_regime(const Graph& g, const TrainConfig& cfg);
RunRecord train_poisson_dynamic(const Graph& g, const TrainConfig& cfg);
RunRecord train(const Graph& g, const TrainConfig& cfg);

}  // namespace sgnn
