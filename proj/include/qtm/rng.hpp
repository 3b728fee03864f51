#pragma once

#include <cstdint>

namespace qtm {

/// Splittable counter-based generator (splitmix64 core). Each protocol run
/// gets its own stream derived from (master seed, stream index), so sweeps
/// can fan out without correlated or shared state.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Independent child stream; mixing with a large odd constant keeps
    /// sibling streams decorrelated.
    SplitMix64 split(std::uint64_t index) {
        std::uint64_t s = next_u64();
        return SplitMix64(s ^ (0x2545f4914f6cdd1dull * (index + 1)));
    }

  private:
    std::uint64_t state_;
};

inline SplitMix64 stream_for_run(std::uint64_t master_seed, std::uint64_t run_index) {
    SplitMix64 root(master_seed);
    return root.split(run_index);
}

} // namespace qtm
