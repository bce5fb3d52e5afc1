#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace hawkes {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based stream: the state is a pure function of (seed, id0, id1, id2),
// so any worker can regenerate the exact same variates for a given cell or site.
class StreamRng {
public:
    StreamRng(std::uint64_t seed, std::uint64_t id0, std::uint64_t id1 = 0,
              std::uint64_t id2 = 0) {
        state_ = mix64(seed ^ 0xa0761d6478bd642fULL);
        state_ = mix64(state_ ^ id0);
        state_ = mix64(state_ ^ id1);
        state_ = mix64(state_ ^ id2);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double exponential(double rate) {
        return -std::log1p(-uniform()) / rate;
    }

    // Knuth's method, chunked so the product never underflows.
    std::uint64_t poisson(double mean) {
        std::uint64_t n = 0;
        while (mean > 30.0) {
            // sum of a Poisson(30) and the remainder
            double p = 1.0;
            const double limit = std::exp(-30.0);
            std::uint64_t k = 0;
            do {
                ++k;
                p *= uniform();
            } while (p > limit);
            n += k - 1;
            mean -= 30.0;
        }
        double p = 1.0;
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        do {
            ++k;
            p *= uniform();
        } while (p > limit);
        return n + k - 1;
    }

private:
    std::uint64_t state_;
};

}  // namespace hawkes
