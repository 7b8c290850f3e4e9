#pragma once

#include "resest/types.hpp"

#include <cstdint>
#include <random>

namespace resest {

/// Seedable 64-bit generator with platform-independent output.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard. The
/// standard distributions are implementation-defined, so every variate here is
/// derived from raw engine words.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Unbiased integer in [0, bound).
    std::uint64_t uniform_index(std::uint64_t bound);

    /// Standard normal (Marsaglia polar method).
    double normal();

    Vector normal_vector(Eigen::Index size);

    /// +1 or -1 with equal probability.
    double sign() { return (next_u64() >> 63) != 0 ? 1.0 : -1.0; }

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; mixes a master seed with a stream counter.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace resest
