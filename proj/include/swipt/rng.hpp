#pragma once

#include <cstdint>
#include <random>

namespace swipt {

/// Engine used for every random draw in the library.
using Engine = std::mt19937_64;

/// Named stream families. Each experiment seed fans out into independent
/// substreams per family so that placement, calibration batches and
/// held-out evaluation never share draws.
enum class StreamTag : std::uint64_t {
  kPlacement = 1,
  kCalibration = 2,
  kEvaluation = 3,
  kPilot = 4,
  kOracle = 5,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Identifies one reproducible substream: (experiment seed, family, index).
/// `index` is typically a calibration iteration or a repetition number;
/// the per-block engines below are derived from it.
struct StreamKey {
  std::uint64_t seed = 0;
  StreamTag tag = StreamTag::kEvaluation;
  std::uint64_t index = 0;

  constexpr StreamKey child(std::uint64_t sub) const noexcept {
    return StreamKey{seed, tag, splitmix64(index ^ splitmix64(sub + 0x51ed2701ULL))};
  }

  constexpr std::uint64_t derive(std::uint64_t block) const noexcept {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
    h = splitmix64(h ^ index);
    return splitmix64(h ^ block);
  }

  Engine engine(std::uint64_t block = 0) const { return Engine(derive(block)); }
};

}  // namespace swipt
