#pragma once

// Counter-based random source. Draw `counter` of stream `stream` under `seed`
// is a pure function of the three integers, so generation can be sharded
// arbitrarily without changing results. The mixing function is the SplitMix64
// output finalizer; the generator identity string is recorded in reports.

#include <cstdint>
#include <string_view>

namespace tickbound {

inline constexpr std::string_view kGeneratorId = "splitmix64-counter/v1";

[[nodiscard]] constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(splitmix64_mix(seed ^ splitmix64_mix(stream * kGamma + 0x632BE59BD9B4E019ULL))) {}

  [[nodiscard]] constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return splitmix64_mix(key_ + (counter + 1) * kGamma);
  }

  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  [[nodiscard]] constexpr double uniform(std::uint64_t counter) const noexcept {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

}  // namespace tickbound
