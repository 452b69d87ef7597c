#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace paramkl
{

/// SplitMix64 finalizer; used to derive independent sub-stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Portable standard-normal stream: std::mt19937_64 (bit-exact across platforms by the
/// standard) feeding a hand-written Box-Muller transform.
class NormalStream
{
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  /// Sub-stream `index` of `seed`. Streams with different indices are independent.
  static NormalStream substream(std::uint64_t seed, std::uint64_t index)
  {
    return NormalStream(splitmix64(seed ^ splitmix64(index + 1)));
  }

  /// Uniform on (0, 1], 53 random bits.
  double uniform()
  {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Box-Muller; the second variate of each pair is cached.
  double normal()
  {
    if (has_cached_)
    {
      has_cached_ = false;
      return cached_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0;
  bool has_cached_ = false;
};

}  // namespace paramkl
