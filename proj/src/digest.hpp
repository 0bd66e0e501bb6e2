#pragma once

#include <cstdint>
#include <string_view>

namespace qpma {

// 64-bit FNV-1a over a canonical byte serialization. Used for transcript
// digests; stable across platforms so report files can be golden-tested.
class Fnv1a64 {
public:
    void update_byte(std::uint8_t b) {
        hash_ ^= b;
        hash_ *= 0x100000001b3ULL;
    }

    void update_u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            update_byte(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }

    void update(std::string_view s) {
        for (char c : s) {
            update_byte(static_cast<std::uint8_t>(c));
        }
        update_byte(0);
    }

    std::uint64_t value() const { return hash_; }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

} // namespace qpma
