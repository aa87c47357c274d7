#pragma once
#include <cstdint>
#include <random>

namespace ebicsel {

/**
 * Deterministic random source used throughout the simulation code.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the
 * standard. Uniform and normal variates are derived here rather than through
 * the <random> distributions, whose algorithms are implementation-defined,
 * so a seed reproduces the same draws on every conforming toolchain.
 */
class RandomStream
{
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (lo, hi).
    double uniform(double lo, double hi);

    /// Standard normal via the Marsaglia polar method.
    double normal();

    bool bernoulli(double prob) { return uniform() < prob; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/**
 * Stream for one (master seed, setting, replicate) triple. The triple is
 * folded through mix64 in a fixed order; the result depends only on the
 * triple, never on call order or thread.
 */
RandomStream derive_stream(std::uint64_t master_seed,
                           std::uint64_t setting_id,
                           std::uint64_t replicate_index);

} // namespace ebicsel
