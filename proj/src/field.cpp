#include "field.hpp"

#include <numbers>

#include "errors.hpp"

namespace qpma {

bool is_prime(std::uint64_t n) {
    if (n < 2) {
        return false;
    }
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            return false;
        }
    }
    return true;
}

std::uint32_t smallest_prime_geq(std::uint32_t n) {
    std::uint32_t p = n < 2 ? 2 : n;
    while (!is_prime(p)) {
        ++p;
    }
    return p;
}

PrimeField::PrimeField(std::uint32_t modulus) : p_(modulus) {
    if (!is_prime(modulus)) {
        throw ValidationError("PrimeField: modulus " + std::to_string(modulus) +
                              " is not prime");
    }
}

std::complex<double> PrimeField::omega(PhaseExponent a) const {
    a %= p_;
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(a) /
                               static_cast<double>(p_));
}

std::vector<std::complex<double>> PrimeField::omega_table() const {
    std::vector<std::complex<double>> table(p_);
    for (std::uint32_t a = 0; a < p_; ++a) {
        table[a] = omega(a);
    }
    return table;
}

} // namespace qpma
