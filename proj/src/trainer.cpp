#include "sgnn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "sgnn/errors.hpp"
#include "sgnn/tape.hpp"

namespace sgnn {

std::string_view to_string(Regime regime) {
  return regime == Regime::poisson_dynamic ? "poisson_dynamic" : "epoch";
}

Regime parse_regime(std::string_view name) {
  if (name == "epoch") return Regime::epoch;
  if (name == "poisson_dynamic" || name == "dynamic") return Regime::poisson_dynamic;
  throw ConfigError("unknown training regime '" + std::string(name) + "'");
}

std::string_view to_string(ClockReset reset) {
  return reset == ClockReset::fresh ? "fresh" : "renewal";
}

ClockReset parse_clock_reset(std::string_view name) {
  if (name == "renewal") return ClockReset::renewal;
  if (name == "fresh") return ClockReset::fresh;
  throw ConfigError("unknown clock reset '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  reg.validate();
  if (model.hidden == 0) throw ConfigError("model.hidden must be positive");
  if (!(opt.lr > 0.0)) throw ConfigError("opt.lr must be positive");
  if (!(opt.weight_decay >= 0.0)) throw ConfigError("opt.weight_decay must be non-negative");
  if (eval_every == 0) throw ConfigError("eval.every must be positive");
  if (regime == Regime::epoch) {
    if (epochs == 0) throw ConfigError("train.epochs must be positive");
  } else {
    if (!(total_time >= 0.0) || !std::isfinite(total_time))
      throw ConfigError("train.T must be non-negative");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("train.dt must be positive");
    if (!(reg.lambda > 0.0)) throw ConfigError("reg.lambda must be positive");
  }
}

namespace {

std::size_t dynamic_steps(double total_time, double dt) {
  if (total_time <= 0.0) return 0;
  // Guard against T/dt landing a hair above an integer, e.g. 0.3 / 0.1.
  const double ratio = total_time / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, rounded))
    return static_cast<std::size_t>(rounded);
  return static_cast<std::size_t>(std::ceil(ratio));
}

using Clock = std::chrono::steady_clock;

// Shared state of one training run.
class RunState {
 public:
  RunState(const Graph& g, const TrainConfig& cfg)
      : g_(g), cfg_(cfg), adj_(normalize(g)) {
    Rng init_rng(cfg.seed, Stream::init);
    model_ = init_model(g.feature_dim(), g.num_classes(), cfg.model, init_rng);
    opt_ = init_optimizer(model_);
    record_.steps = scheduled_steps(cfg);
  }

  const NormalizedAdjacency& adj() const { return adj_; }

  // One optimizer step on the given effective input. Returns the loss, or
  // NaN when no training node is active.
  double train_step(const EffectiveInput& in) {
    const NodeMask loss_mask = in.active ? (g_.train_mask() & *in.active) : g_.train_mask();
    if (loss_mask.none()) return std::numeric_limits<double>::quiet_NaN();
    Tape tape;
    const auto pass = forward(tape, model_, in.op, in.features,
                              in.hidden_mask ? &*in.hidden_mask : nullptr);
    const auto loss = masked_cross_entropy(tape, pass.logits, g_.labels(), loss_mask);
    const double value = tape.value(loss)(0, 0);
    const Gradients grads = backward(tape, pass, loss);
    optimizer_step(model_, grads, opt_, cfg_.opt);
    return value;
  }

  void finish_step(std::size_t step, double t, double loss, double active_frac,
                   Clock::time_point started) {
    if (std::isnan(loss)) ++record_.skipped_steps;
    active_sum_ += active_frac;
    const bool last = step == record_.steps;
    if (step % cfg_.eval_every != 0 && !last) return;
    RunRow row;
    row.step = step;
    row.t = t;
    row.loss = loss;
    row.active_frac = active_frac;
    row.val_acc = g_.val_mask().none() ? 0.0 : evaluate(model_, g_, adj_, g_.val_mask());
    row.test_acc = g_.test_mask().none() ? 0.0 : evaluate(model_, g_, adj_, g_.test_mask());
    if (cfg_.record_time)
      row.ms = std::chrono::duration<double, std::milli>(Clock::now() - started).count();
    record_.rows.push_back(row);
  }

  RunRecord finish() {
    if (!record_.rows.empty()) {
      const RunRow* chosen = &record_.rows.back();
      if (cfg_.select_best_val) {
        // Earliest evaluation point with the highest validation accuracy.
        chosen = &record_.rows.front();
        for (const auto& row : record_.rows)
          if (row.val_acc > chosen->val_acc) chosen = &row;
      }
      record_.final_val = chosen->val_acc;
      record_.final_test = chosen->test_acc;
    } else {
      record_.final_val = g_.val_mask().none() ? 0.0 : evaluate(model_, g_, adj_, g_.val_mask());
      record_.final_test =
          g_.test_mask().none() ? 0.0 : evaluate(model_, g_, adj_, g_.test_mask());
    }
    record_.mean_active_frac =
        record_.steps == 0 ? 0.0 : active_sum_ / static_cast<double>(record_.steps);
    record_.model = model_;
    return std::move(record_);
  }

 private:
  const Graph& g_;
  const TrainConfig& cfg_;
  NormalizedAdjacency adj_;
  Model model_;
  OptimizerState opt_;
  RunRecord record_;
  double active_sum_ = 0.0;
};

}  // namespace

std::size_t scheduled_steps(const TrainConfig& cfg) {
  return cfg.regime == Regime::epoch ? cfg.epochs : dynamic_steps(cfg.total_time, cfg.dt);
}

DynamicSchedule::DynamicSchedule(std::vector<double> rates, double total_time, double dt,
                                 ClockReset reset, std::uint64_t seed)
    : clocks_(std::move(rates), Rng(seed, Stream::clocks)),
      dt_(dt),
      reset_(reset),
      total_steps_(0) {
  if (!(dt > 0.0)) throw ConfigError("train.dt must be positive");
  total_steps_ = dynamic_steps(total_time, dt);
}

NodeMask DynamicSchedule::step() {
  const double t = time();
  NodeMask fired = active_set(clocks_, t);
  if (reset_ == ClockReset::renewal) {
    resample_fired(clocks_, fired);
  } else {
    for (std::size_t v = 0; v < fired.size(); ++v)
      if (fired[v]) clocks_.restart(v, t);
  }
  ++taken_;
  return fired;
}

double accuracy(const Matrix& logits, std::span<const std::int32_t> labels, const NodeMask& mask) {
  if (mask.size() != logits.rows() || labels.size() != logits.rows())
    throw ShapeError("accuracy: mask/labels do not match logits");
  if (mask.none()) throw EmptyMaskError("accuracy: empty mask");
  std::size_t correct = 0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    if (!mask[r]) continue;
    const auto row = logits.row(r);
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c)
      if (row[c] > row[best]) best = c;
    if (static_cast<std::int32_t>(best) == labels[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(mask.count());
}

double evaluate(const Model& model, const Graph& g, const NormalizedAdjacency& adj,
                const NodeMask& mask) {
  return accuracy(predict(model, adj.matrix, g.features()), g.labels(), mask);
}

RunRecord train_epoch_regime(const Graph& g, const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.regime != Regime::epoch) throw ConfigError("train_epoch_regime: regime must be epoch");
  RunState run(g, cfg);
  Rng plan_rng(cfg.seed, Stream::plan);
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto started = Clock::now();
    const StochasticPlan plan = plan_epoch(cfg.reg, g, cfg.model.hidden, epoch, plan_rng);
    const EffectiveInput in =
        apply(plan, g, run.adj(), g.features(), cfg.reg.renormalize_subgraph);
    const double loss = run.train_step(in);
    run.finish_step(epoch, static_cast<double>(epoch), loss, plan.active_fraction(), started);
  }
  return run.finish();
}

RunRecord train_poisson_dynamic(const Graph& g, const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.regime != Regime::poisson_dynamic)
    throw ConfigError("train_poisson_dynamic: regime must be poisson_dynamic");
  RunState run(g, cfg);
  DynamicSchedule schedule(node_rates(g, cfg.reg.lambda, cfg.reg.rate_mode), cfg.total_time,
                           cfg.dt, cfg.clock_reset, cfg.seed);
  while (!schedule.done()) {
    const auto started = Clock::now();
    const double t = schedule.time();
    StochasticPlan plan;
    plan.epoch = schedule.steps_taken() + 1;
    plan.node_mask = schedule.step();
    const EffectiveInput in =
        apply(plan, g, run.adj(), g.features(), cfg.reg.renormalize_subgraph);
    const double loss = run.train_step(in);
    run.finish_step(schedule.steps_taken(), t, loss, plan.active_fraction(), started);
  }
  return run.finish();
}

RunRecord train(const Graph& g, const TrainConfig& cfg) {
  return cfg.regime == Regime::epoch ? train_epoch_regime(g, cfg) : train_poisson_dynamic(g, cfg);
}

}  // namespace sgnn
