#pragma once

#include <array>
#include <cstdint>

namespace glyphwarp {

/// Deterministic random stream: xoshiro256** seeded through splitmix64.
///
/// Every draw method consumes a fixed number of 64-bit outputs so that
/// samplers built on top of it have a fixed draw budget:
///   uniform / uniform_int / bernoulli : 1 draw
///   normal                            : 2 draws (Box-Muller, no caching)
///   fork                              : 1 draw
/// substream() does not consume anything; it derives a child from the seed.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0);

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64();

    /// Uniform real on [0,1) with 53 bits of resolution.
    double uniform01();
    /// Uniform real on [lo,hi).
    double uniform(double lo, double hi);
    /// Uniform integer on the closed range [lo,hi]; lo > hi is treated as lo.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    bool bernoulli(double p);
    double normal();
    double normal(double mean, double stddev);

    /// Independent child keyed by `key`; a pure function of (seed, key).
    RngStream substream(std::uint64_t key) const;
    /// Child seeded from the next draw of this stream.
    RngStream fork();

    friend bool operator==(const RngStream&, const RngStream&) = default;

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_;
};

/// splitmix64 finalizer, exposed for seed derivation elsewhere.
std::uint64_t mix64(std::uint64_t x);

}  // namespace glyphwarp
