#pragma once

#include <cstdint>
#include <string_view>

namespace bangbang {

// splitmix64 step; the standard finalizer used to expand one seed into many.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Derive a named substream seed from a master seed. All randomness in the
/// toolkit flows from one master seed through names like "analysis/growth";
/// re-running a single stage reproduces its draws regardless of the others.
inline std::uint64_t derive_stream(std::uint64_t seed, std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ull ^ seed;
    for (char c : name) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 0x100000001b3ull;
    }
    std::uint64_t s = h;
    return splitmix64(s);
}

/// Small deterministic generator (xoshiro-free: splitmix64 chain). We avoid
/// std::uniform_real_distribution because its output is implementation
/// defined; the bit pattern here is stable across platforms.
class Prng {
public:
    explicit Prng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t state_;
};

/// Generator for the i-th sample of a named substream. Sample index is mixed
/// into the seed so parallel sampling loops draw identical numbers no matter
/// how iterations are scheduled.
inline Prng sample_rng(std::uint64_t seed, std::string_view stream, std::uint64_t index) {
    std::uint64_t s = derive_stream(seed, stream) ^ (0x9e3779b97f4a7c15ull * (index + 1));
    return Prng(splitmix64(s));
}

} // namespace bangbang
