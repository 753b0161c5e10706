#pragma once

#include <cstdint>
#include <limits>

namespace ellipsim {

/// Counter-based generator: output n is a SplitMix64 finalizer applied to
/// key + n * golden. A stream is fully described by (key, counter), so
/// realization k of a run derives its key from (seed, k) and needs no shared
/// state. Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng() = default;
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream), key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    /// Number of raw draws consumed so far.
    std::uint64_t draws() const { return counter_; }

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform() { return double((*this)() >> 11) * 0x1.0p-53; }

private:
    static constexpr std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t key_ = mix(0x632be59bd9b4e019ULL);
    std::uint64_t counter_ = 0;
};

} // namespace ellipsim
