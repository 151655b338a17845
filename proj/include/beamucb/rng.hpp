#pragma once

#include <cstdint>
#include <random>

namespace beamucb {

// Independent streams derived from one master seed.
enum class Stream : std::uint64_t {
    kTrace = 1,
    kNoise = 2,
};

std::uint64_t splitmix64(std::uint64_t& state);

// derive_seed(master, stream, index): three chained splitmix64 steps over
// master ^ (stream * 0x9E3779B97F4A7C15) ^ (index * 0xD1B54A32D192ED03).
std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0);

using Rng = std::mt19937_64;

}  // namespace beamucb
