#pragma once

#include <cstdint>

namespace hiter {

// xoshiro256++ seeded through splitmix64. Self-contained so that streams are
// bit-identical across platforms and standard libraries (std:: distributions
// are not reproducible between implementations).
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t z = seed;
        for (auto& w : s_) {
            z += 0x9e3779b97f4a7c15ULL;
            std::uint64_t x = z;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
            w = x ^ (x >> 31);
        }
    }

    std::uint64_t next() {
        auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
        std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // [0,1) with 53 random bits
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // [0,n), rejection-debiased
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

private:
    std::uint64_t s_[4];
};

} // namespace hiter
