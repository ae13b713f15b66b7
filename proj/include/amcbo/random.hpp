#pragma once

#include <cstdint>
#include <random>

namespace amcbo {

using Rng = std::mt19937_64;

/// Purpose tags for the substreams derived from one master seed.
enum class StreamTag : std::uint32_t {
  InitPositions = 1,
  InitWeights = 2,
  Batch = 3,
  ParticleNoise = 4,
};

/// Deterministic substream for (seed, purpose, index). Streams for different
/// particles are independent of each other and of evaluation order.
inline Rng make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t index = 0) {
  std::seed_seq sequence{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(index),
                         static_cast<std::uint32_t>(index >> 32)};
  return Rng(sequence);
}

}  // namespace amcbo
