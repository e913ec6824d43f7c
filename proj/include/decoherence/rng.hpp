#pragma once

#include <array>
#include <cstdint>

#include "decoherence/core.hpp"

namespace decoherence {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A draw is a
/// pure function of (key, counter), so streams can be consumed in any order.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key) noexcept;
};

/// SplitMix64 finalizer, used to derive stream keys.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Gaussian noise for one trajectory, addressed by (step, channel).
class NoiseStream {
 public:
  NoiseStream(std::uint64_t master_seed, std::uint64_t trajectory_index) noexcept;

  /// Stream identifier derived from (master_seed, trajectory_index).
  std::uint64_t id() const noexcept { return id_; }

  /// Complex Gaussian with E[z] = 0, E[|z|^2] = variance, E[z^2] = 0.
  Complex complex_gaussian(std::uint64_t step, std::uint32_t channel, double variance) const noexcept;

  /// Two uniforms in (0, 1] with 53-bit resolution.
  std::array<double, 2> uniforms(std::uint64_t step, std::uint32_t channel) const noexcept;

 private:
  std::uint64_t id_;
  Philox4x32::Key key_;
};

}  // namespace decoherence
