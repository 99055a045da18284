#ifndef QRLAB_GF256_HPP
#define QRLAB_GF256_HPP

#include <array>
#include <cstdint>
#include <stdexcept>

namespace qrlab::gf {

// GF(2^8) under the QR primitive polynomial x^8 + x^4 + x^3 + x^2 + 1.
inline constexpr unsigned kPrimitivePoly = 0x11D;

namespace detail {

struct Tables {
    std::array<std::uint8_t, 512> antilog{};  // alpha^i, doubled to skip a mod
    std::array<std::uint8_t, 256> log{};      // log[0] unused
};

constexpr Tables build_tables() {
    Tables t{};
    unsigned x = 1;
    for (int i = 0; i < 255; ++i) {
        t.antilog[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(x);
        t.antilog[static_cast<std::size_t>(i + 255)] = static_cast<std::uint8_t>(x);
        t.log[x] = static_cast<std::uint8_t>(i);
        x <<= 1;
        if (x & 0x100) x ^= kPrimitivePoly;
    }
    t.antilog[510] = t.antilog[255];
    t.antilog[511] = t.antilog[256];
    return t;
}

inline constexpr Tables kTables = build_tables();

}  // namespace detail

inline constexpr std::uint8_t add(std::uint8_t a, std::uint8_t b) {
    return a ^ b;
}

inline constexpr std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
    if (a == 0 || b == 0) return 0;
    return detail::kTables.antilog[detail::kTables.log[a] + detail::kTables.log[b]];
}

// alpha^e for e >= 0 (reduced mod 255).
inline constexpr std::uint8_t exp(unsigned e) {
    return detail::kTables.antilog[e % 255];
}

inline constexpr std::uint8_t log(std::uint8_t a) {
    return detail::kTables.log[a];
}

inline constexpr std::uint8_t inv(std::uint8_t a) {
    if (a == 0) throw std::domain_error("gf256: inverse of zero");
    return detail::kTables.antilog[255 - detail::kTables.log[a]];
}

inline constexpr std::uint8_t div(std::uint8_t a, std::uint8_t b) {
    return mul(a, inv(b));
}

}  // namespace qrlab::gf

#endif  // QRLAB_GF256_HPP
