#pragma once

#include <cstdint>

namespace chaosbounds {

/// Counter-based random stream. Each (seed, stream) pair indexes an
/// independent substream whose output is a pure function of the pair, so
/// per-sample streams reproduce bit-for-bit regardless of scheduling.
/// Values are produced by splitmix64 over an offset counter; Gaussians use
/// an explicit Box-Muller transform to stay identical across platforms.
class SampleRng {
 public:
  SampleRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1).
  double uniform01();

  double gaussian();

  /// -1 or +1 with equal probability.
  double rademacher();

  /// Uniform on [-sqrt(3), sqrt(3)]; unit variance.
  double uniform_scaled();

  /// Standard symmetric exponential (Laplace with density exp(-|x|)/2).
  double sym_exponential();

  /// Standard Gaussian conditioned on |z| <= 3, rescaled to unit variance.
  double truncated_gaussian();

 private:
  std::uint64_t state_;
};

/// Stable 64-bit mix of a seed and a small set of tags, used to derive
/// per-instance and per-purpose substream keys.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b = 0,
                          std::uint64_t tag_c = 0);

}  // namespace chaosbounds
