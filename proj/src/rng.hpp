#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace qpma {

// Deterministic random stream. Substreams are derived from a master seed and
// a purpose tag so that independent uses of randomness (pads, set generation,
// measurement, tamper unitaries) never share a stream. Bounded sampling uses
// rejection instead of std::uniform_int_distribution, which keeps the byte
// stream identical across standard library implementations.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    static RandomStream derive(std::uint64_t master, std::string_view tag,
                               std::uint64_t index = 0) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : tag) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        std::uint64_t x = master ^ h ^ (index * 0x9e3779b97f4a7c15ULL);
        return RandomStream(mix(mix(x)));
    }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, n), n >= 1.
    std::uint32_t uniform_below(std::uint32_t n) {
        if (n <= 1) {
            return 0;
        }
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = gen_();
        while (x >= limit) {
            x = gen_();
        }
        return static_cast<std::uint32_t>(x % n);
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller on the uniform stream.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) {
            u1 = uniform01();
        }
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace qpma
