#include "beamucb/rng.hpp"

namespace beamucb {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index) {
    std::uint64_t state = master ^ (static_cast<std::uint64_t>(stream) * 0x9E3779B97F4A7C15ULL) ^
                          (index * 0xD1B54A32D192ED03ULL);
    splitmix64(state);
    splitmix64(state);
    return splitmix64(state);
}

}  // namespace beamucb
