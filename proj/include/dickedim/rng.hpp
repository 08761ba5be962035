#pragma once

#include <cstdint>
#include <random>

namespace dickedim {

// Independent generator for task `index` of a run seeded with `seed`. Results depend only
// on (seed, index), never on which worker executes the task.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x5eedu};
  return std::mt19937_64(seq);
}

}  // namespace dickedim
