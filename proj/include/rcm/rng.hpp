#pragma once
// Deterministic random numbers.
//
// Every random decision made by the samplers is a pure function of a 64-bit
// seed and up to three stream indices, so results are reproducible bit for
// bit regardless of evaluation order or thread count. Monte Carlo chains
// index their streams by (seed, chain, sweep, edge).

#include <cstdint>

namespace rcm {

// splitmix64 finalizer; bijective on 64-bit words
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash_u64(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = mix64(seed ^ 0x632be59bd9b4e019ull);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    return h;
}

// uniform double in [0,1) with 53 random bits
constexpr double uniform01(std::uint64_t seed, std::uint64_t a,
                           std::uint64_t b = 0, std::uint64_t c = 0) {
    return static_cast<double>(hash_u64(seed, a, b, c) >> 11) * 0x1.0p-53;
}

// Sequential stream for code that just needs a run of uniforms; the stream
// id keeps independent consumers from colliding under one seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : base_(hash_u64(seed, 0x5eedab1e5eedab1eull, stream)) {}

    std::uint64_t bits() { return mix64(base_ ^ counter_++); }
    double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n), n >= 1; multiply-shift, bias < 2^-64
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(bits()) * n) >> 64);
    }

  private:
    std::uint64_t base_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace rcm
