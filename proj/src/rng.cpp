#include "sgnn/rng.hpp"

#include <cmath>
#include <numbers>

namespace sgnn {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

constexpr double kTwoPowMinus53 = 1.0 / 9007199254740992.0;

}  // namespace

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = splitmix64_mix(seed) ^ splitmix64_mix(stream + 0x632be59bd9b4e019ULL);
  for (auto& word : s_) {
    x += 0x9e3779b97f4a7c15ULL;
    word = splitmix64_mix(x);
  }
}

Rng::result_type Rng::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform_open_closed() {
  return static_cast<double>(((*this)() >> 11) + 1) * kTwoPowMinus53;
}

double Rng::uniform() { return static_cast<double>((*this)() >> 11) * kTwoPowMinus53; }

bool Rng::bernoulli(double p) { return uniform() < p; }

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection sampling on the full 64-bit draw.
  const std::uint64_t limit = max() - (max() % n + 1) % n;
  std::uint64_t x;
  do {
    x = (*this)();
  } while (x > limit);
  return x % n;
}

double Rng::normal() {
  const double u1 = uniform_open_closed();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace sgnn
