#ifndef QRLAB_QR_ENCODER_HPP
#define QRLAB_QR_ENCODER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qrlab/image.hpp"
#include "qrlab/qr_code.hpp"
#include "qrlab/reed_solomon.hpp"

namespace qrlab::qr {

struct PayloadTooLarge : std::length_error {
    using std::length_error::length_error;
};

inline constexpr int kAutoMask = -1;

// Byte-mode symbol request. The payload is raw bytes; text is expected to
// arrive UTF-8 encoded and is stored without an ECI header.
struct QrSpec {
    std::string payload;
    EcLevel ec = EcLevel::Q;
    int mask = kAutoMask;
};

// Smallest version in 1..10 whose byte-mode capacity at ec fits the payload.
inline int select_version(std::size_t payload_len, EcLevel ec) {
    for (int v = kMinVersion; v <= kMaxVersion; ++v)
        if (payload_len <= static_cast<std::size_t>(byte_capacity(v, ec))) return v;
    throw PayloadTooLarge("qr: payload does not fit any version <= 10");
}

namespace detail {

class BitWriter {
public:
    void push(unsigned value, int bits) {
        for (int i = bits - 1; i >= 0; --i) bits_.push_back((value >> i) & 1u);
    }
    std::size_t size() const { return bits_.size(); }
    std::vector<std::uint8_t> to_bytes() const {
        std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80 >> (i % 8));
        return out;
    }

private:
    std::vector<std::uint8_t> bits_;
};

// Mode 0100 bitstream with terminator and 0xEC/0x11 padding.
inline std::vector<std::uint8_t> build_data_codewords(const std::string& payload,
                                                      int version, EcLevel ec) {
    const int capacity_bytes = data_codewords(version, ec);
    BitWriter bw;
    bw.push(0x4, 4);
    bw.push(static_cast<unsigned>(payload.size()), length_field_bits(version));
    for (char c : payload) bw.push(static_cast<unsigned char>(c), 8);

    const std::size_t capacity_bits = static_cast<std::size_t>(capacity_bytes) * 8;
    if (bw.size() > capacity_bits) throw PayloadTooLarge("qr: bitstream overflow");
    const int terminator = static_cast<int>(std::min<std::size_t>(4, capacity_bits - bw.size()));
    bw.push(0, terminator);
    if (bw.size() % 8 != 0) bw.push(0, static_cast<int>(8 - bw.size() % 8));

    auto bytes = bw.to_bytes();
    bool alt = false;
    while (bytes.size() < static_cast<std::size_t>(capacity_bytes)) {
        bytes.push_back(alt ? 0x11 : 0xEC);
        alt = !alt;
    }
    return bytes;
}

// Block split per the EC table (short blocks first), RS parity per block,
// then codeword interleaving.
inline std::vector<std::uint8_t> interleave_codewords(const std::vector<std::uint8_t>& data,
                                                      int version, EcLevel ec) {
    const int nb = num_blocks(version, ec);
    const int ecc = ecc_per_block(version, ec);
    const int total_data = static_cast<int>(data.size());
    const int short_len = total_data / nb;
    const int num_long = total_data % nb;

    std::vector<std::vector<std::uint8_t>> blocks, parities;
    int offset = 0;
    for (int b = 0; b < nb; ++b) {
        const int len = short_len + (b >= nb - num_long ? 1 : 0);
        std::vector<std::uint8_t> block(data.begin() + offset, data.begin() + offset + len);
        offset += len;
        parities.push_back(rs::encode(block, ecc).parity);
        blocks.push_back(std::move(block));
    }

    std::vector<std::uint8_t> out;
    out.reserve(static_cast<std::size_t>(
        kTotalCodewords[static_cast<std::size_t>(version - 1)]));
    for (int i = 0; i <= short_len; ++i)
        for (int b = 0; b < nb; ++b)
            if (i < static_cast<int>(blocks[static_cast<std::size_t>(b)].size()))
                out.push_back(blocks[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)]);
    for (int i = 0; i < ecc; ++i)
        for (int b = 0; b < nb; ++b)
            out.push_back(parities[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)]);
    return out;
}

inline void draw_finder(ModuleMatrix& m, int cx, int cy) {
    for (int dy = -4; dy <= 4; ++dy) {
        for (int dx = -4; dx <= 4; ++dx) {
            const int x = cx + dx, y = cy + dy;
            if (x < 0 || x >= m.side() || y < 0 || y >= m.side()) continue;
            const int d = std::max(std::abs(dx), std::abs(dy));
            m.set(x, y, d != 2 && d != 4);
        }
    }
}

inline void draw_function_patterns(ModuleMatrix& m) {
    const int side = m.side();
    for (int i = 0; i < side; ++i) {
        m.set(6, i, i % 2 == 0);
        m.set(i, 6, i % 2 == 0);
    }
    draw_finder(m, 3, 3);
    draw_finder(m, side - 4, 3);
    draw_finder(m, 3, side - 4);
    const auto centers = alignment_positions(m.version());
    for (int cy : centers) {
        for (int cx : centers) {
            const bool in_finder = (cx <= 8 && cy <= 8) || (cx >= side - 9 && cy <= 8) ||
                                   (cx <= 8 && cy >= side - 9);
            if (in_finder) continue;
            for (int dy = -2; dy <= 2; ++dy)
                for (int dx = -2; dx <= 2; ++dx)
                    m.set(cx + dx, cy + dy,
                          std::max(std::abs(dx), std::abs(dy)) != 1);
        }
    }
    if (m.version() >= 7) {
        const int bits = version_bits_encode(m.version());
        for (int i = 0; i < 18; ++i) {
            const bool bit = (bits >> i) & 1;
            const int a = side - 11 + i % 3;
            const int b = i / 3;
            m.set(a, b, bit);
            m.set(b, a, bit);
        }
    }
}

inline void draw_format_bits(ModuleMatrix& m, EcLevel ec, int mask) {
    const int bits = format_bits_encode(ec, mask);
    const int side = m.side();
    auto bit = [bits](int i) { return ((bits >> i) & 1) != 0; };
    for (int i = 0; i <= 5; ++i) m.set(8, i, bit(i));
    m.set(8, 7, bit(6));
    m.set(8, 8, bit(7));
    m.set(7, 8, bit(8));
    for (int i = 9; i < 15; ++i) m.set(14 - i, 8, bit(i));
    for (int i = 0; i < 8; ++i) m.set(side - 1 - i, 8, bit(i));
    for (int i = 8; i < 15; ++i) m.set(8, side - 15 + i, bit(i));
    m.set(8, side - 8, true);  // dark module
}

// ISO penalty rules N1..N4.
inline long mask_penalty(const ModuleMatrix& m) {
    const int side = m.side();
    long score = 0;

    auto scan_line = [&](auto cell_at) {
        long line_score = 0;
        std::vector<std::pair<bool, long>> runs;  // (color, length)
        bool color = cell_at(0);
        long run = 1;
        for (int i = 1; i < side; ++i) {
            if (cell_at(i) == color) {
                ++run;
                continue;
            }
            runs.emplace_back(color, run);
            color = cell_at(i);
            run = 1;
        }
        runs.emplace_back(color, run);

        // N1: runs of length >= 5
        for (const auto& [c, len] : runs)
            if (len >= 5) line_score += 3 + (len - 5);

        // N3: 1:1:3:1:1 dark pattern with a wide light flank. The border
        // counts as light, so pad boundary runs; even indices are light.
        std::vector<long> p;
        if (runs.front().first) p.push_back(side);
        for (const auto& [c, len] : runs) p.push_back(len);
        if (!runs.front().first) p.front() += side;
        if (runs.back().first) p.push_back(side);
        else p.back() += side;

        for (std::size_t i = 1; i + 5 < p.size(); i += 2) {
            const long n = p[i];
            const bool core = n > 0 && p[i + 1] == n && p[i + 2] == 3 * n &&
                              p[i + 3] == n && p[i + 4] == n;
            if (!core) continue;
            if (p[i - 1] >= 4 * n && p[i + 5] >= n) line_score += 40;
            if (p[i + 5] >= 4 * n && p[i - 1] >= n) line_score += 40;
        }
        return line_score;
    };

    for (int y = 0; y < side; ++y)
        score += scan_line([&](int i) { return m.get(i, y); });
    for (int x = 0; x < side; ++x)
        score += scan_line([&](int i) { return m.get(x, i); });

    for (int y = 0; y < side - 1; ++y)
        for (int x = 0; x < side - 1; ++x) {
            const bool c = m.get(x, y);
            if (c == m.get(x + 1, y) && c == m.get(x, y + 1) && c == m.get(x + 1, y + 1))
                score += 3;
        }

    long dark = 0;
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x)
            if (m.get(x, y)) ++dark;
    const long total = static_cast<long>(side) * side;
    const long k = (std::abs(dark * 20 - total * 10) + total - 1) / total - 1;
    score += k * 10;
    return score;
}

inline void apply_mask(ModuleMatrix& m, const std::vector<std::uint8_t>& function_map, int mask) {
    const int side = m.side();
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x)
            if (!function_map[static_cast<std::size_t>(y) * side + x] && mask_bit(mask, x, y))
                m.flip(x, y);
}

}  // namespace detail

// Full byte-mode encode: bitstream, RS blocks, interleave, placement, mask
// selection by the four penalty rules when the spec asks for AUTO. Two
// encodes of an identical spec produce identical matrices.
inline ModuleMatrix encode_matrix(const QrSpec& spec) {
    if (spec.mask != kAutoMask && (spec.mask < 0 || spec.mask > 7))
        throw std::invalid_argument("qr: mask out of range");
    const int version = select_version(spec.payload.size(), spec.ec);
    const auto data = detail::build_data_codewords(spec.payload, version, spec.ec);
    const auto codewords = detail::interleave_codewords(data, version, spec.ec);
    const auto function_map = function_module_map(version);

    ModuleMatrix base(version);
    detail::draw_function_patterns(base);
    std::size_t bit_index = 0;
    const std::size_t total_bits = codewords.size() * 8;
    for_each_data_module(base.side(), function_map, [&](int x, int y) {
        if (bit_index < total_bits) {
            const std::uint8_t byte = codewords[bit_index >> 3];
            base.set(x, y, (byte >> (7 - (bit_index & 7))) & 1);
        }
        ++bit_index;
    });

    if (spec.mask != kAutoMask) {
        detail::apply_mask(base, function_map, spec.mask);
        detail::draw_format_bits(base, spec.ec, spec.mask);
        return base;
    }

    int best_mask = 0;
    long best_penalty = 0;
    for (int mask = 0; mask < 8; ++mask) {
        ModuleMatrix candidate = base;
        detail::apply_mask(candidate, function_map, mask);
        detail::draw_format_bits(candidate, spec.ec, mask);
        const long penalty = detail::mask_penalty(candidate);
        if (mask == 0 || penalty < best_penalty) {
            best_penalty = penalty;
            best_mask = mask;
        }
    }
    detail::apply_mask(base, function_map, best_mask);
    detail::draw_format_bits(base, spec.ec, best_mask);
    return base;
}

// Dark module -> 0.0, light -> 1.0; output side = (side + 2*quiet) * scale.
inline img::GrayImage render(const ModuleMatrix& m, int scale, int quiet) {
    if (scale < 1) throw std::invalid_argument("render: scale < 1");
    if (quiet < 0) throw std::invalid_argument("render: negative quiet zone");
    const int out_side = (m.side() + 2 * quiet) * scale;
    img::GrayImage out(out_side, out_side, 1.0);
    for (int y = 0; y < m.side(); ++y)
        for (int x = 0; x < m.side(); ++x) {
            if (!m.get(x, y)) continue;
            for (int py = 0; py < scale; ++py)
                for (int px = 0; px < scale; ++px)
                    out.at((x + quiet) * scale + px, (y + quiet) * scale + py) = 0.0;
        }
    return out;
}

}  // namespace qrlab::qr

#endif  // QRLAB_QR_ENCODER_HPP
