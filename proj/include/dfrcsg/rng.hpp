#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace dfrcsg {

// splitmix64, used to expand (seed, stream) pairs into engine state.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t s) : state(s) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

/**
 * xoshiro256++ engine with counter-based stream derivation.
 *
 * Rng(seed, stream) yields a reproducible, platform-independent stream;
 * independent streams for different `stream` values make parallel and
 * serial Monte-Carlo runs bit-identical. All variate transforms
 * (uniform, exponential, normal) are implemented here so no
 * implementation-defined standard-library distribution is involved.
 */
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream) {
        SplitMix64 sm(seed ^ (0xa0761d6478bd642fULL * (stream + 1)));
        for (auto& w : s_) w = sm.next();
        // a zero state is invalid for xoshiro
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9e3779b97f4a7c15ULL;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1), 53-bit resolution
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Exp(rate); uses 1-u in (0,1] so log never sees zero
    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

    // Box-Muller; both values of the pair are consumed in call order
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace dfrcsg
