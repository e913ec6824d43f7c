#include "decoherence/rng.hpp"

#include <cmath>
#include <numbers>

namespace decoherence {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

NoiseStream::NoiseStream(std::uint64_t master_seed, std::uint64_t trajectory_index) noexcept
    : id_(splitmix64(splitmix64(master_seed) ^ trajectory_index)),
      key_{static_cast<std::uint32_t>(id_), static_cast<std::uint32_t>(id_ >> 32)} {}

std::array<double, 2> NoiseStream::uniforms(std::uint64_t step, std::uint32_t channel) const noexcept {
  const Philox4x32::Counter out = Philox4x32::generate(
      {static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32), channel, 0u}, key_);
  auto to_unit = [](std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  };
  return {to_unit(out[0], out[1]), to_unit(out[2], out[3])};
}

Complex NoiseStream::complex_gaussian(std::uint64_t step, std::uint32_t channel, double variance) const noexcept {
  const auto [u1, u2] = uniforms(step, channel);
  // Box-Muller: |z|^2 is exponential with mean `variance`, phase uniform.
  const double radius = std::sqrt(-variance * std::log(u1));
  const double phase = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(phase), radius * std::sin(phase)};
}

}  // namespace decoherence
