#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sgnn/node_mask.hpp"
#include "sgnn/rng.hpp"

namespace sgnn {

class Graph;

// -ln(U) / rate with U uniform on (0, 1]. Throws ConfigError if rate <= 0
// or is not finite.
double sample_exponential(double rate, Rng& rng);

// Per-node exponential clocks: the next firing time of every node together
// with its rate and the generator that feeds the renewals.
class ClockState {
 public:
  ClockState(std::vector<double> rates, Rng rng);

  std::size_t size() const noexcept { return rates_.size(); }
  std::span<const double> next_event() const noexcept { return next_event_; }
  std::span<const double> rates() const noexcept { return rates_; }

  // Node v fires: next_event[v] += Exp(rate[v]).
  void renew(std::size_t v);
  // Restart node v from time `from`: next_event[v] = from + Exp(rate[v]).
  void restart(std::size_t v, double from);

 private:
  std::vector<double> rates_;
  std::vector<double> next_event_;
  Rng rng_;
};

// Draws next_event[v] ~ Exp(rates[v]) in node order from the clocks stream
// of `seed`.
ClockState init_clocks(std::size_t num_nodes, std::span<const double> rates, std::uint64_t seed);
ClockState init_clocks(std::size_t num_nodes, double rate, std::uint64_t seed);

// {v : next_event[v] <= t}. Throws ConfigError for negative or NaN t.
NodeMask active_set(const ClockState& clocks, double t);

// Renews every node set in `mask`, in node order.
void resample_fired(ClockState& clocks, const NodeMask& mask);

// Simulates each clock with renewals up to `horizon` and returns the total
// number of firings across all clocks.
std::uint64_t merged_event_count(std::span<const double> rates, double horizon, Rng& rng);

enum class RateMode { uniform, degree };

// uniform: every node gets `lambda`.
// degree:  lambda * (deg(v) + 1) / mean(deg + 1), so the mean rate stays lambda.
std::vector<double> node_rates(const Graph& g, double lambda, RateMode mode);

}  // namespace sgnn
