#pragma once
#include <cstdint>
#include <initializer_list>

namespace dirty {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Order-sensitive hash of a list of integers, used to derive per-trial seeds.
constexpr std::uint64_t hash_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (auto v : parts)
        h = mix64(h ^ mix64(v));
    return h;
}

/// Counter-based generator: output i of stream (seed, stream) is a pure
/// function of (seed, stream, i), independent of platform and of other
/// streams.
class StreamRng {
public:
    StreamRng(std::uint64_t seed, std::uint64_t stream) : key_(hash_seed({seed, stream})) {}

    std::uint64_t next_u64() { return mix64(key_ ^ mix64(counter_++)); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal (Marsaglia polar method).
    double normal();

    bool coin() { return (next_u64() >> 63) != 0; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace dirty
