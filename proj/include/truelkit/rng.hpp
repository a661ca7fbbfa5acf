#pragma once

// Reproducible random streams. A SeedSpec is a master seed plus a pure
// function from substream index to generator, so parallel work items can draw
// independent streams whose union does not depend on thread scheduling.

#include <cstdint>
#include <random>

namespace truelkit {

// Finalizer from the splitmix64 generator: bijective on 64-bit words and a
// good avalanche mixer, which makes sequential substream indices safe to use.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

struct SeedSpec {
    std::uint64_t master = 0;

    // Generator for substream `index`. Identical (master, index) pairs yield
    // identical streams on every platform this library targets; streams for
    // different indices are decorrelated by double splitmix64 mixing.
    std::mt19937_64 stream(std::uint64_t index) const {
        return std::mt19937_64(splitmix64(splitmix64(master) ^ index));
    }
};

} // namespace truelkit
