#pragma once

#include <cstdint>
#include <limits>

namespace sgnn {

// Logical streams derived from one run seed. Each consumer owns its own
// stream so that e.g. adding an eval step never shifts the training draws.
enum class Stream : std::uint64_t {
  main = 0,
  init = 1,
  plan = 2,
  clocks = 3,
  data = 4,
  split = 5,
  bench = 6,
};

// xoshiro256** (Blackman & Vigna, 2018), state seeded from SplitMix64.
//
// Seeding: x = mix(seed) ^ mix(stream + 0x632be59bd9b4e019), where mix is the
// SplitMix64 finalizer; the four state words are the next four SplitMix64
// outputs starting from x. All derived quantities below use only the top
// 53 bits of a draw, so any xoshiro256** implementation reproduces them.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);
  Rng(std::uint64_t seed, Stream stream) : Rng(seed, static_cast<std::uint64_t>(stream)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // ((x >> 11) + 1) * 2^-53, i.e. uniform on (0, 1]; never returns 0.
  double uniform_open_closed();
  // (x >> 11) * 2^-53, uniform on [0, 1).
  double uniform();
  // True with probability p (uniform() < p).
  bool bernoulli(double p);
  // Uniform integer in [0, n) by rejection on the top bits; n > 0.
  std::uint64_t below(std::uint64_t n);
  // Standard normal via Box-Muller, one draw pair per call (second discarded).
  double normal();

 private:
  std::uint64_t s_[4];
};

std::uint64_t splitmix64_mix(std::uint64_t z);

}  // namespace sgnn
