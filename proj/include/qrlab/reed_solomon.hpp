#ifndef QRLAB_REED_SOLOMON_HPP
#define QRLAB_REED_SOLOMON_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qrlab/gf256.hpp"

namespace qrlab::rs {

// Systematic Reed-Solomon codeword over GF(256): data followed by parity.
// The concatenation, read as a polynomial with data[0] the highest-degree
// coefficient, evaluates to zero at alpha^0 .. alpha^(ecc_len-1).
struct RsBlock {
    std::vector<std::uint8_t> data;
    std::vector<std::uint8_t> parity;
};

struct RsDecoded {
    std::vector<std::uint8_t> data;
    int corrections = 0;
};

// Generator polynomial prod_{i=0..ecc_len-1} (x - alpha^i), coefficients in
// descending degree order with the leading 1 included.
inline std::vector<std::uint8_t> generator_poly(int ecc_len) {
    std::vector<std::uint8_t> g{1};
    for (int i = 0; i < ecc_len; ++i) {
        std::vector<std::uint8_t> next(g.size() + 1, 0);
        const std::uint8_t root = gf::exp(static_cast<unsigned>(i));
        for (std::size_t j = 0; j < g.size(); ++j) {
            next[j] = gf::add(next[j], g[j]);           // x * g
            next[j + 1] = gf::add(next[j + 1], gf::mul(g[j], root));
        }
        g = std::move(next);
    }
    return g;
}

inline RsBlock encode(const std::vector<std::uint8_t>& data, int ecc_len) {
    if (ecc_len < 0) throw std::invalid_argument("rs: negative ecc_len");
    if (ecc_len == 0) return {data, {}};
    if (data.empty()) throw std::invalid_argument("rs: empty data");
    if (data.size() + static_cast<std::size_t>(ecc_len) > 255)
        throw std::invalid_argument("rs: block longer than 255");

    const auto g = generator_poly(ecc_len);
    std::vector<std::uint8_t> rem(static_cast<std::size_t>(ecc_len), 0);
    for (std::uint8_t d : data) {
        const std::uint8_t factor = gf::add(d, rem[0]);
        rem.erase(rem.begin());
        rem.push_back(0);
        for (int j = 0; j < ecc_len; ++j)
            rem[static_cast<std::size_t>(j)] = gf::add(
                rem[static_cast<std::size_t>(j)],
                gf::mul(g[static_cast<std::size_t>(j) + 1], factor));
    }
    return {data, std::move(rem)};
}

namespace detail {

// Evaluate a polynomial given in ascending coefficient order.
inline std::uint8_t eval_ascending(const std::vector<std::uint8_t>& p, std::uint8_t x) {
    std::uint8_t acc = 0;
    for (std::size_t i = p.size(); i-- > 0;)
        acc = gf::add(gf::mul(acc, x), p[i]);
    return acc;
}

inline std::vector<std::uint8_t> syndromes(const std::vector<std::uint8_t>& msg, int ecc_len) {
    std::vector<std::uint8_t> s(static_cast<std::size_t>(ecc_len), 0);
    for (int j = 0; j < ecc_len; ++j) {
        const std::uint8_t xj = gf::exp(static_cast<unsigned>(j));
        std::uint8_t acc = 0;
        for (std::uint8_t byte : msg) acc = gf::add(gf::mul(acc, xj), byte);
        s[static_cast<std::size_t>(j)] = acc;
    }
    return s;
}

// Berlekamp-Massey: shortest LFSR (error locator, ascending order) matching
// the syndrome sequence.
inline std::vector<std::uint8_t> berlekamp_massey(const std::vector<std::uint8_t>& synd) {
    std::vector<std::uint8_t> locator{1};
    std::vector<std::uint8_t> prev{1};
    int len = 0;
    int shift = 1;
    std::uint8_t prev_discrepancy = 1;

    for (std::size_t n = 0; n < synd.size(); ++n) {
        std::uint8_t delta = synd[n];
        for (int i = 1; i <= len; ++i)
            delta = gf::add(delta,
                            gf::mul(locator[static_cast<std::size_t>(i)],
                                    synd[n - static_cast<std::size_t>(i)]));
        if (delta == 0) {
            ++shift;
            continue;
        }
        const std::uint8_t scale = gf::div(delta, prev_discrepancy);
        std::vector<std::uint8_t> next = locator;
        if (next.size() < prev.size() + static_cast<std::size_t>(shift))
            next.resize(prev.size() + static_cast<std::size_t>(shift), 0);
        for (std::size_t i = 0; i < prev.size(); ++i)
            next[i + static_cast<std::size_t>(shift)] =
                gf::add(next[i + static_cast<std::size_t>(shift)], gf::mul(prev[i], scale));
        if (2 * len <= static_cast<int>(n)) {
            prev = std::move(locator);
            prev_discrepancy = delta;
            len = static_cast<int>(n) + 1 - len;
            shift = 1;
        } else {
            ++shift;
        }
        locator = std::move(next);
    }
    while (locator.size() > 1 && locator.back() == 0) locator.pop_back();
    return locator;
}

}  // namespace detail

// Syndrome decode with Berlekamp-Massey, Chien search and Forney magnitudes.
// Returns the corrected data and the number of corrected symbols, or nullopt
// when the block is uncorrectable. Success implies the re-encoded result has
// all-zero syndromes.
inline std::optional<RsDecoded> decode(const RsBlock& block) {
    const int ecc_len = static_cast<int>(block.parity.size());
    const std::size_t n = block.data.size() + block.parity.size();
    if (n > 255) throw std::invalid_argument("rs: block longer than 255");
    if (ecc_len == 0) return RsDecoded{block.data, 0};

    std::vector<std::uint8_t> msg = block.data;
    msg.insert(msg.end(), block.parity.begin(), block.parity.end());

    auto synd = detail::syndromes(msg, ecc_len);
    bool clean = true;
    for (std::uint8_t s : synd)
        if (s != 0) clean = false;
    if (clean) return RsDecoded{block.data, 0};

    const auto locator = detail::berlekamp_massey(synd);
    const int num_errors = static_cast<int>(locator.size()) - 1;
    if (num_errors == 0 || 2 * num_errors > ecc_len) return std::nullopt;

    // Chien search over byte positions: position i holds the coefficient of
    // x^(n-1-i); it is an error location iff locator(alpha^-(n-1-i)) == 0.
    std::vector<std::size_t> positions;
    std::vector<std::uint8_t> locs;  // X_k = alpha^(n-1-i)
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned power = static_cast<unsigned>(n - 1 - i) % 255;
        const std::uint8_t x_inv = gf::exp(255 - power);
        if (detail::eval_ascending(locator, x_inv) == 0) {
            positions.push_back(i);
            locs.push_back(gf::exp(power));
        }
    }
    if (static_cast<int>(positions.size()) != num_errors) return std::nullopt;

    // Omega(x) = S(x) * Lambda(x) mod x^ecc_len, ascending order.
    std::vector<std::uint8_t> omega(static_cast<std::size_t>(ecc_len), 0);
    for (std::size_t i = 0; i < omega.size(); ++i)
        for (std::size_t j = 0; j < locator.size() && j <= i; ++j)
            omega[i] = gf::add(omega[i], gf::mul(locator[j], synd[i - j]));

    // Formal derivative keeps odd-degree terms only.
    std::vector<std::uint8_t> locator_deriv;
    for (std::size_t i = 1; i < locator.size(); i += 2)
        locator_deriv.push_back(locator[i]);

    int corrections = 0;
    for (std::size_t k = 0; k < positions.size(); ++k) {
        const std::uint8_t x = locs[k];
        const std::uint8_t x_inv = gf::inv(x);
        // derivative evaluated at x_inv, accounting for the skipped degrees
        std::uint8_t denom = 0;
        const std::uint8_t x_inv2 = gf::mul(x_inv, x_inv);
        std::uint8_t pow = 1;
        for (std::uint8_t c : locator_deriv) {
            denom = gf::add(denom, gf::mul(c, pow));
            pow = gf::mul(pow, x_inv2);
        }
        if (denom == 0) return std::nullopt;
        const std::uint8_t magnitude =
            gf::mul(x, gf::div(detail::eval_ascending(omega, x_inv), denom));
        if (magnitude != 0) ++corrections;
        msg[positions[k]] = gf::add(msg[positions[k]], magnitude);
    }

    for (std::uint8_t s : detail::syndromes(msg, ecc_len))
        if (s != 0) return std::nullopt;

    msg.resize(block.data.size());
    return RsDecoded{std::move(msg), corrections};
}

}  // namespace qrlab::rs

#endif  // QRLAB_REED_SOLOMON_HPP
