#ifndef KH_RNG_HPP
#define KH_RNG_HPP

#include <cstdint>

namespace kh {

// Counter-based uniform stream: every draw is a pure function of
// (seed, index), so parallel fills are order-independent and runs
// with the same seed are bit-identical.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t stream_u64(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed) ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
}

// Uniform in [0, 1), 53 significant bits.
inline double stream_unit(std::uint64_t seed, std::uint64_t index) {
    return static_cast<double>(stream_u64(seed, index) >> 11) * 0x1.0p-53;
}

} // namespace kh

#endif
