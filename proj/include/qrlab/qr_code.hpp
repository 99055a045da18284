#ifndef QRLAB_QR_CODE_HPP
#define QRLAB_QR_CODE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrlab::qr {

inline constexpr int kMinVersion = 1;
inline constexpr int kMaxVersion = 10;

enum class EcLevel { L, M, Q, H };

inline constexpr std::array<EcLevel, 4> kAllEcLevels{EcLevel::L, EcLevel::M,
                                                     EcLevel::Q, EcLevel::H};

inline constexpr double nominal_recovery(EcLevel ec) {
    switch (ec) {
        case EcLevel::L: return 0.07;
        case EcLevel::M: return 0.15;
        case EcLevel::Q: return 0.25;
        case EcLevel::H: return 0.30;
    }
    return 0.0;
}

inline constexpr char ec_name(EcLevel ec) {
    switch (ec) {
        case EcLevel::L: return 'L';
        case EcLevel::M: return 'M';
        case EcLevel::Q: return 'Q';
        case EcLevel::H: return 'H';
    }
    return '?';
}

inline std::optional<EcLevel> ec_from_name(char c) {
    switch (c) {
        case 'L': case 'l': return EcLevel::L;
        case 'M': case 'm': return EcLevel::M;
        case 'Q': case 'q': return EcLevel::Q;
        case 'H': case 'h': return EcLevel::H;
    }
    return std::nullopt;
}

// Two-bit field values stored in the format information.
inline constexpr int ec_format_bits(EcLevel ec) {
    switch (ec) {
        case EcLevel::L: return 1;
        case EcLevel::M: return 0;
        case EcLevel::Q: return 3;
        case EcLevel::H: return 2;
    }
    return 0;
}

// Square grid of QR modules, true = dark. One module per cell.
class ModuleMatrix {
public:
    ModuleMatrix() = default;
    explicit ModuleMatrix(int version)
        : version_(version), side_(17 + 4 * version),
          cells_(static_cast<std::size_t>(side_) * side_, 0) {
        if (version < kMinVersion || version > kMaxVersion)
            throw std::invalid_argument("qr: version out of range");
    }

    int version() const { return version_; }
    int side() const { return side_; }

    bool get(int x, int y) const {
        return cells_[static_cast<std::size_t>(y) * side_ + x] != 0;
    }
    void set(int x, int y, bool dark) {
        cells_[static_cast<std::size_t>(y) * side_ + x] = dark ? 1 : 0;
    }
    void flip(int x, int y) {
        cells_[static_cast<std::size_t>(y) * side_ + x] ^= 1;
    }

    bool operator==(const ModuleMatrix&) const = default;

private:
    int version_ = 0;
    int side_ = 0;
    std::vector<std::uint8_t> cells_;
};

// --- ISO tables, versions 1..10 (index [version - 1]) ------------------

inline constexpr std::array<int, 10> kTotalCodewords{
    26, 44, 70, 100, 134, 172, 196, 242, 292, 346};

// Indexed [ec][version - 1] with ec order L, M, Q, H.
inline constexpr int kEccPerBlock[4][10] = {
    {7, 10, 15, 20, 26, 18, 20, 24, 30, 18},
    {10, 16, 26, 18, 24, 16, 18, 22, 22, 26},
    {13, 22, 18, 26, 18, 24, 18, 22, 20, 24},
    {17, 28, 22, 16, 22, 28, 26, 26, 24, 28},
};

inline constexpr int kNumBlocks[4][10] = {
    {1, 1, 1, 1, 1, 2, 2, 2, 2, 4},
    {1, 1, 1, 2, 2, 4, 4, 4, 5, 5},
    {1, 1, 2, 2, 4, 4, 6, 6, 8, 8},
    {1, 1, 2, 4, 4, 4, 5, 6, 8, 8},
};

inline int ecc_per_block(int version, EcLevel ec) {
    return kEccPerBlock[static_cast<int>(ec)][version - 1];
}
inline int num_blocks(int version, EcLevel ec) {
    return kNumBlocks[static_cast<int>(ec)][version - 1];
}
inline int data_codewords(int version, EcLevel ec) {
    return kTotalCodewords[static_cast<std::size_t>(version - 1)] -
           ecc_per_block(version, ec) * num_blocks(version, ec);
}

// Byte-mode character count field width.
inline int length_field_bits(int version) { return version <= 9 ? 8 : 16; }

// Maximum byte-mode payload length.
inline int byte_capacity(int version, EcLevel ec) {
    const int bits = data_codewords(version, ec) * 8 - 4 - length_field_bits(version);
    return bits / 8;
}

// Alignment pattern centre coordinates (both axes).
inline std::vector<int> alignment_positions(int version) {
    switch (version) {
        case 1: return {};
        case 2: return {6, 18};
        case 3: return {6, 22};
        case 4: return {6, 26};
        case 5: return {6, 30};
        case 6: return {6, 34};
        case 7: return {6, 22, 38};
        case 8: return {6, 24, 42};
        case 9: return {6, 26, 46};
        case 10: return {6, 28, 50};
    }
    throw std::invalid_argument("qr: version out of range");
}

// --- format / version information ---------------------------------------

// BCH(15,5)-protected format word for (ec, mask), xor-masked per the
// standard so it is never all zero.
inline int format_bits_encode(EcLevel ec, int mask) {
    const int data = ec_format_bits(ec) << 3 | mask;
    int rem = data;
    for (int i = 0; i < 10; ++i) rem = (rem << 1) ^ ((rem >> 9) * 0x537);
    return ((data << 10) | rem) ^ 0x5412;
}

struct FormatInfo {
    EcLevel ec = EcLevel::L;
    int mask = 0;
};

// Minimum-distance decode of one 15-bit format word copy. Returns the best
// candidate and its Hamming distance.
inline std::pair<FormatInfo, int> format_bits_decode(int bits) {
    int best_distance = 16;
    FormatInfo best{};
    for (EcLevel ec : kAllEcLevels) {
        for (int mask = 0; mask < 8; ++mask) {
            const int cand = format_bits_encode(ec, mask);
            const int dist = __builtin_popcount(static_cast<unsigned>(cand ^ bits));
            if (dist < best_distance) {
                best_distance = dist;
                best = {ec, mask};
            }
        }
    }
    return {best, best_distance};
}

// BCH(18,6) version word, versions 7+.
inline int version_bits_encode(int version) {
    int rem = version;
    for (int i = 0; i < 12; ++i) rem = (rem << 1) ^ ((rem >> 11) * 0x1F25);
    return version << 12 | rem;
}

// --- module geometry -----------------------------------------------------

// Grid of cells reserved for function patterns (finders, separators, timing,
// alignment, format and version areas, dark module). Shared by placement and
// extraction so both walk the identical zigzag order.
inline std::vector<std::uint8_t> function_module_map(int version) {
    const int side = 17 + 4 * version;
    std::vector<std::uint8_t> fn(static_cast<std::size_t>(side) * side, 0);
    auto mark = [&](int x, int y) {
        if (x >= 0 && x < side && y >= 0 && y < side)
            fn[static_cast<std::size_t>(y) * side + x] = 1;
    };

    for (int i = 0; i < side; ++i) {  // timing
        mark(6, i);
        mark(i, 6);
    }
    for (int dy = -4; dy <= 4; ++dy) {  // finders + separators
        for (int dx = -4; dx <= 4; ++dx) {
            mark(3 + dx, 3 + dy);
            mark(side - 4 + dx, 3 + dy);
            mark(3 + dx, side - 4 + dy);
        }
    }
    const auto centers = alignment_positions(version);
    for (int cy : centers) {
        for (int cx : centers) {
            // skip the three corners occupied by finders
            const bool in_finder =
                (cx <= 8 && cy <= 8) || (cx >= side - 9 && cy <= 8) || (cx <= 8 && cy >= side - 9);
            if (in_finder) continue;
            for (int dy = -2; dy <= 2; ++dy)
                for (int dx = -2; dx <= 2; ++dx) mark(cx + dx, cy + dy);
        }
    }
    for (int i = 0; i <= 8; ++i) {  // format area around the top-left finder
        mark(8, i);
        mark(i, 8);
    }
    for (int i = 0; i < 8; ++i) {  // second format copy + dark module
        mark(side - 1 - i, 8);
        mark(8, side - 1 - i);
    }
    if (version >= 7) {  // version areas
        for (int i = 0; i < 18; ++i) {
            const int a = side - 11 + i % 3;
            const int b = i / 3;
            mark(a, b);
            mark(b, a);
        }
    }
    return fn;
}

// Visit non-function modules in codeword placement order (two-column zigzag
// from the bottom-right, skipping the vertical timing column).
template <typename Fn>
void for_each_data_module(int side, const std::vector<std::uint8_t>& function_map, Fn&& fn) {
    for (int right = side - 1; right >= 1; right -= 2) {
        if (right == 6) right = 5;
        const bool upward = ((right + 1) & 2) == 0;
        for (int step = 0; step < side; ++step) {
            const int y = upward ? side - 1 - step : step;
            for (int j = 0; j < 2; ++j) {
                const int x = right - j;
                if (!function_map[static_cast<std::size_t>(y) * side + x]) fn(x, y);
            }
        }
    }
}

inline bool mask_bit(int mask, int x, int y) {
    switch (mask) {
        case 0: return (x + y) % 2 == 0;
        case 1: return y % 2 == 0;
        case 2: return x % 3 == 0;
        case 3: return (x + y) % 3 == 0;
        case 4: return (y / 2 + x / 3) % 2 == 0;
        case 5: return x * y % 2 + x * y % 3 == 0;
        case 6: return (x * y % 2 + x * y % 3) % 2 == 0;
        case 7: return ((x + y) % 2 + x * y % 3) % 2 == 0;
    }
    throw std::invalid_argument("qr: mask out of range");
}

}  // namespace qrlab::qr

#endif  // QRLAB_QR_CODE_HPP
