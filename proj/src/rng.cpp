#include "chaosbounds/rng.hpp"

#include <cmath>
#include <numbers>

namespace chaosbounds {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

SampleRng::SampleRng(std::uint64_t seed, std::uint64_t stream) {
  // Two mixing rounds separate the key halves; streams with adjacent
  // indices share no observable structure.
  std::uint64_t s = seed ^ 0x2545f4914f6cdd1dull;
  std::uint64_t a = splitmix64(s);
  s ^= stream * 0x9e3779b97f4a7c15ull + 0x632be59bd9b4e019ull;
  std::uint64_t b = splitmix64(s);
  state_ = a ^ (b + 0x9e3779b97f4a7c15ull);
}

std::uint64_t SampleRng::next_u64() { return splitmix64(state_); }

double SampleRng::uniform01() {
  // 53 random bits, shifted into (0, 1).
  return (double((next_u64() >> 11)) + 0.5) * 0x1p-53;
}

double SampleRng::gaussian() {
  const double u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double SampleRng::rademacher() { return (next_u64() & 1ull) ? 1.0 : -1.0; }

double SampleRng::uniform_scaled() {
  return (2.0 * uniform01() - 1.0) * std::sqrt(3.0);
}

double SampleRng::sym_exponential() {
  const double u = uniform01();
  const double e = -std::log(uniform01());
  return (u < 0.5) ? -e : e;
}

double SampleRng::truncated_gaussian() {
  // Variance of the standard normal truncated to |z| <= 3, for rescaling
  // to unit variance: 1 - 2*3*phi(3) / (2*Phi(3) - 1).
  static const double kTruncStd = [] {
    const double phi3 = std::exp(-4.5) / std::sqrt(2.0 * std::numbers::pi);
    const double mass = std::erf(3.0 / std::sqrt(2.0));
    return std::sqrt(1.0 - 6.0 * phi3 / mass);
  }();
  double z = gaussian();
  while (std::abs(z) > 3.0) z = gaussian();
  return z / kTruncStd;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b,
                          std::uint64_t tag_c) {
  std::uint64_t s = seed;
  (void)splitmix64(s);
  s ^= tag_a * 0xff51afd7ed558ccdull;
  (void)splitmix64(s);
  s ^= tag_b * 0xc4ceb9fe1a85ec53ull;
  (void)splitmix64(s);
  s ^= tag_c * 0x9e3779b97f4a7c15ull;
  return splitmix64(s);
}

}  // namespace chaosbounds
