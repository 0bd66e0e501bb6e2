#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace qpma {

// Exponent a of the primitive root of unity omega_P^a, canonical in [0, P).
using PhaseExponent = std::uint32_t;

bool is_prime(std::uint64_t n);

// Least prime P with P >= n. n >= 1.
std::uint32_t smallest_prime_geq(std::uint32_t n);

// Exact arithmetic over Z_P for a prime modulus P, plus evaluation of P-th
// roots of unity. Element values are canonical in [0, P); all integer
// operations are exact, complex numbers appear only at evaluation boundaries.
class PrimeField {
public:
    explicit PrimeField(std::uint32_t modulus);

    std::uint32_t modulus() const { return p_; }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
        const std::uint64_t s = static_cast<std::uint64_t>(a) + b;
        return static_cast<std::uint32_t>(s >= p_ ? s - p_ : s);
    }

    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const {
        return a >= b ? a - b : a + p_ - b;
    }

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
        return static_cast<std::uint32_t>(
            static_cast<std::uint64_t>(a) * b % p_);
    }

    std::uint32_t neg(std::uint32_t a) const { return a == 0 ? 0 : p_ - a; }

    // Canonical representative of an arbitrary signed integer.
    std::uint32_t reduce(std::int64_t v) const {
        std::int64_t r = v % static_cast<std::int64_t>(p_);
        if (r < 0) {
            r += p_;
        }
        return static_cast<std::uint32_t>(r);
    }

    // e^{2 pi i a / P}. |result| = 1 to machine precision.
    std::complex<double> omega(PhaseExponent a) const;

    // Table of all P root-of-unity values, index a -> omega(a).
    std::vector<std::complex<double>> omega_table() const;

private:
    std::uint32_t p_;
};

} // namespace qpma
