#pragma once

#include <cstdint>

namespace speclab {

// Counter-based generator: raw(i) depends only on (seed, i), so any draw can be
// reproduced without replaying the stream and parallel consumers can't race.
// The mixer is the splitmix64 finalizer.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t raw(std::uint64_t counter) const {
        return mix(seed_ ^ mix(counter + 0x9e3779b97f4a7c15ULL));
    }

    // Uniform on [0, 1).
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(raw(counter) >> 11) * 0x1.0p-53;
    }

    // Uniform on [-1, 1].
    double symmetric(std::uint64_t counter) const {
        return 2.0 * uniform(counter) - 1.0;
    }

    std::uint64_t seed() const { return seed_; }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
};

}  // namespace speclab
