#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rcm {

// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based standard normal source: draw(k) depends only on
// (seed, stream, k), so any sample can be regenerated independently and in
// any order.
class CounterNormal {
 public:
  CounterNormal(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

  double operator()(std::int64_t counter) const noexcept {
    const auto c = static_cast<std::uint64_t>(counter);
    const double u1 = to_unit(splitmix64(key_ ^ splitmix64(2 * c)));
    const double u2 = to_unit(splitmix64(key_ ^ splitmix64(2 * c + 1)));
    // Box-Muller, cosine branch only.
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  // Uniform in (0, 1].
  static double to_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
  }

  std::uint64_t key_;
};

}  // namespace rcm
