#pragma once

#include <cstdint>
#include <cmath>

namespace tetramotion {

// splitmix64: tiny counter-style generator with 64-bit state. One mixing
// round is also how stream keys are derived, so any (seed, id...) tuple
// yields an independent, reproducible stream on every platform.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
    SplitMix64 m(a ^ (0x9e3779b97f4a7c15ULL + (b << 1) + (b >> 3)));
    std::uint64_t k = m.next();
    m.state ^= b * 0xbf58476d1ce4e5b9ULL;
    return k ^ m.next();
}

// One random stream. Draws never touch std:: distributions so that output
// is bit-identical across standard libraries.
class Stream {
public:
    explicit Stream(std::uint64_t key) : gen_(key) {}

    static Stream keyed(std::uint64_t seed, std::uint64_t replication, std::uint64_t channel) {
        return Stream(mix_key(mix_key(seed, replication), channel));
    }

    std::uint64_t next_u64() { return gen_.next(); }

    // uniform on the open interval (0,1); never returns 0 or 1
    double uniform() {
        return (static_cast<double>(gen_.next() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) {
        return -std::log(uniform()) / rate;
    }

private:
    SplitMix64 gen_;
};

}  // namespace tetramotion
