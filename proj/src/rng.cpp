#include "glyphwarp/rng.hpp"

#include <cmath>
#include <numbers>

namespace glyphwarp {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
        s += kGolden;
        word = mix64(s);
    }
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
    const double u = uniform01();
    if (hi <= lo) return lo;
    const auto span = static_cast<double>(hi - lo + 1);
    auto k = static_cast<std::int64_t>(std::floor(u * span));
    if (k > hi - lo) k = hi - lo;
    return lo + k;
}

bool RngStream::bernoulli(double p) { return uniform01() < p; }

double RngStream::normal() {
    const double u1 = 1.0 - uniform01();  // (0,1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::normal(double mean, double stddev) { return mean + stddev * normal(); }

RngStream RngStream::substream(std::uint64_t key) const {
    return RngStream(mix64(seed_ ^ mix64(key + kGolden)));
}

RngStream RngStream::fork() { return RngStream(next_u64()); }

}  // namespace glyphwarp
