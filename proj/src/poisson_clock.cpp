#include "sgnn/poisson_clock.hpp"

#include <cmath>
#include <string>

#include "sgnn/errors.hpp"
#include "sgnn/graph.hpp"

namespace sgnn {

namespace {

void check_rate(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw ConfigError("exponential rate must be positive and finite, got " + std::to_string(rate));
}

}  // namespace

double sample_exponential(double rate, Rng& rng) {
  check_rate(rate);
  return -std::log(rng.uniform_open_closed()) / rate;
}

ClockState::ClockState(std::vector<double> rates, Rng rng)
    : rates_(std::move(rates)), next_event_(rates_.size(), 0.0), rng_(rng) {
  for (double r : rates_) check_rate(r);
  for (std::size_t v = 0; v < rates_.size(); ++v)
    next_event_[v] = sample_exponential(rates_[v], rng_);
}

void ClockState::renew(std::size_t v) { next_event_[v] += sample_exponential(rates_[v], rng_); }

void ClockState::restart(std::size_t v, double from) {
  next_event_[v] = from + sample_exponential(rates_[v], rng_);
}

ClockState init_clocks(std::size_t num_nodes, std::span<const double> rates, std::uint64_t seed) {
  if (rates.size() != num_nodes)
    throw ShapeError("init_clocks: " + std::to_string(rates.size()) + " rates for " +
                     std::to_string(num_nodes) + " nodes");
  return ClockState(std::vector<double>(rates.begin(), rates.end()), Rng(seed, Stream::clocks));
}

ClockState init_clocks(std::size_t num_nodes, double rate, std::uint64_t seed) {
  return ClockState(std::vector<double>(num_nodes, rate), Rng(seed, Stream::clocks));
}

NodeMask active_set(const ClockState& clocks, double t) {
  if (!(t >= 0.0)) throw ConfigError("active_set: time must be non-negative");
  NodeMask mask(clocks.size());
  const auto next = clocks.next_event();
  for (std::size_t v = 0; v < next.size(); ++v)
    if (next[v] <= t) mask.set(v, true);
  return mask;
}

void resample_fired(ClockState& clocks, const NodeMask& mask) {
  if (mask.size() != clocks.size())
    throw ShapeError("resample_fired: mask size " + std::to_string(mask.size()) +
                     " != clock count " + std::to_string(clocks.size()));
  if (mask.none()) return;
  for (std::size_t v = 0; v < mask.size(); ++v)
    if (mask[v]) clocks.renew(v);
}

std::uint64_t merged_event_count(std::span<const double> rates, double horizon, Rng& rng) {
  if (!(horizon > 0.0)) throw ConfigError("merged_event_count: horizon must be positive");
  std::uint64_t count = 0;
  for (double rate : rates) {
    double t = sample_exponential(rate, rng);
    while (t <= horizon) {
      ++count;
      t += sample_exponential(rate, rng);
    }
  }
  return count;
}

std::vector<double> node_rates(const Graph& g, double lambda, RateMode mode) {
  check_rate(lambda);
  const std::size_t n = g.num_nodes();
  std::vector<double> rates(n, lambda);
  if (mode == RateMode::degree && n > 0) {
    double mean = 0.0;
    for (std::size_t v = 0; v < n; ++v) mean += static_cast<double>(g.degree(v)) + 1.0;
    mean /= static_cast<double>(n);
    for (std::size_t v = 0; v < n; ++v)
      rates[v] = lambda * (static_cast<double>(g.degree(v)) + 1.0) / mean;
  }
  return rates;
}

}  // namespace sgnn
