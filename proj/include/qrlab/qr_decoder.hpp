#ifndef QRLAB_QR_DECODER_HPP
#define QRLAB_QR_DECODER_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrlab/image.hpp"
#include "qrlab/qr_code.hpp"
#include "qrlab/reed_solomon.hpp"

namespace qrlab::qr {

enum class DecodeStatus {
    Success,
    NoFindersFound,
    FormatUndecodable,
    UncorrectableBlock,
    MalformedBitstream,
};

inline const char* decode_status_name(DecodeStatus s) {
    switch (s) {
        case DecodeStatus::Success: return "Success";
        case DecodeStatus::NoFindersFound: return "NoFindersFound";
        case DecodeStatus::FormatUndecodable: return "FormatUndecodable";
        case DecodeStatus::UncorrectableBlock: return "UncorrectableBlock";
        case DecodeStatus::MalformedBitstream: return "MalformedBitstream";
    }
    return "?";
}

struct DecodeResult {
    DecodeStatus status = DecodeStatus::NoFindersFound;
    std::string text;  // valid iff status == Success

    bool ok() const { return status == DecodeStatus::Success; }
};

struct FinderCenter {
    double x = 0.0;
    double y = 0.0;
    double module_size = 0.0;
    int score = 0;
};

namespace detail {

inline bool dark_at(const img::GrayImage& bin, int x, int y) {
    return bin.at(x, y) == 0.0;
}

struct Candidate {
    double x, y, module;
};

// 1:1:3:1:1 ratio check against a five-run window; tolerance is +-0.5 of the
// estimated module size per element.
inline bool finder_ratio_ok(const std::array<double, 5>& runs) {
    const double total = runs[0] + runs[1] + runs[2] + runs[3] + runs[4];
    if (total < 7.0) return false;
    const double ms = total / 7.0;
    const double tol = std::max(0.5 * ms, 0.5);
    static constexpr std::array<double, 5> expected{1, 1, 3, 1, 1};
    for (int i = 0; i < 5; ++i)
        if (std::abs(runs[static_cast<std::size_t>(i)] - expected[static_cast<std::size_t>(i)] * ms) > tol)
            return false;
    return true;
}

// Scan one line (row or column) for finder windows. `get` reads the i-th
// binary cell of the line, `emit` receives (center offset along the line,
// module size).
template <typename Get, typename Emit>
void scan_line_for_finders(int length, Get&& get, Emit&& emit) {
    std::vector<std::pair<bool, int>> runs;
    bool color = get(0);
    int run = 1;
    for (int i = 1; i < length; ++i) {
        if (get(i) == color) {
            ++run;
            continue;
        }
        runs.emplace_back(color, run);
        color = get(i);
        run = 1;
    }
    runs.emplace_back(color, run);

    double pos = 0.0;
    std::vector<double> starts(runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) {
        starts[i] = pos;
        pos += runs[i].second;
    }
    for (std::size_t i = 0; i + 4 < runs.size(); ++i) {
        if (!runs[i].first) continue;  // window starts dark
        std::array<double, 5> window{};
        for (int k = 0; k < 5; ++k)
            window[static_cast<std::size_t>(k)] = runs[i + static_cast<std::size_t>(k)].second;
        if (!finder_ratio_ok(window)) continue;
        const double total = window[0] + window[1] + window[2] + window[3] + window[4];
        emit(starts[i] + total / 2.0, total / 7.0);
    }
}

// Walk dark/light/dark runs outward from (x0, y0) along direction (dx, dy).
// Returns {center_run_arm, light_run, outer_dark_run} or nullopt if the
// structure is not present within `limit` steps.
inline std::optional<std::array<int, 3>> walk_runs(const img::GrayImage& bin, int x0, int y0,
                                                   int dx, int dy, int limit) {
    if (!dark_at(bin, x0, y0)) return std::nullopt;
    std::array<int, 3> out{0, 0, 0};
    int x = x0, y = y0;
    int phase = 0;
    for (int step = 0; step <= limit; ++step) {
        const bool want_dark = (phase != 1);
        if (x < 0 || x >= bin.width || y < 0 || y >= bin.height) break;
        if (dark_at(bin, x, y) == want_dark) {
            ++out[static_cast<std::size_t>(phase)];
        } else if (++phase >= 3) {
            break;
        } else {
            ++out[static_cast<std::size_t>(phase)];
        }
        x += dx;
        y += dy;
    }
    if (out[0] == 0 || out[1] == 0 || out[2] == 0) return std::nullopt;
    return out;
}

// Cross-check the finder structure through (cx, cy) along (dx, dy) and its
// opposite; returns the refined center offset along that axis, or nullopt.
inline std::optional<double> cross_check(const img::GrayImage& bin, int cx, int cy, int dx,
                                         int dy, double expected_module) {
    const int limit = static_cast<int>(std::ceil(expected_module * 6.0)) + 2;
    const auto fwd = walk_runs(bin, cx, cy, dx, dy, limit);
    const auto bwd = walk_runs(bin, cx, cy, -dx, -dy, limit);
    if (!fwd || !bwd) return std::nullopt;
    const std::array<double, 5> runs{
        static_cast<double>((*bwd)[2]), static_cast<double>((*bwd)[1]),
        static_cast<double>((*bwd)[0] + (*fwd)[0] - 1), static_cast<double>((*fwd)[1]),
        static_cast<double>((*fwd)[2])};
    if (!finder_ratio_ok(runs)) return std::nullopt;
    const double ms = (runs[0] + runs[1] + runs[2] + runs[3] + runs[4]) / 7.0;
    if (expected_module > 0 && std::abs(ms - expected_module) > 0.7 * expected_module)
        return std::nullopt;
    // start of the window along the walk axis, then its midpoint
    const double along0 = (dx != 0 ? cx : cy) - ((*bwd)[0] - 1) - (*bwd)[1] - (*bwd)[2];
    return along0 + (runs[0] + runs[1] + runs[2] + runs[3] + runs[4]) / 2.0;
}

struct Cluster {
    double sum_x = 0, sum_y = 0, sum_ms = 0;
    int count = 0;
    bool vertical_ok = false;
    bool diagonal_ok = false;
    double x() const { return sum_x / count; }
    double y() const { return sum_y / count; }
    double ms() const { return sum_ms / count; }
    int score() const { return count + 2 * (vertical_ok ? 1 : 0) + 2 * (diagonal_ok ? 1 : 0); }
};

inline void add_to_clusters(std::vector<Cluster>& clusters, const Candidate& c) {
    for (Cluster& cl : clusters) {
        const double tol = std::max(1.6 * cl.ms(), 1.6);
        if (std::abs(c.x - cl.x()) <= tol && std::abs(c.y - cl.y()) <= tol) {
            cl.sum_x += c.x;
            cl.sum_y += c.y;
            cl.sum_ms += c.module;
            ++cl.count;
            return;
        }
    }
    clusters.push_back(Cluster{c.x, c.y, c.module, 1, false, false});
}

}  // namespace detail

// Locate the three finder patterns of an upright symbol in a binary image.
// Rows and columns are scanned for 1:1:3:1:1 runs; candidate centers are
// clustered, each cluster is confirmed by vertical and diagonal line checks
// (with one pixel of slack so a single damaged module cannot erase a
// finder), and the strongest geometrically consistent triple wins.
// Returned in top-left, top-right, bottom-left order.
inline std::optional<std::array<FinderCenter, 3>> locate_finders(const img::GrayImage& bin) {
    std::vector<detail::Cluster> clusters;
    for (int y = 0; y < bin.height; ++y)
        detail::scan_line_for_finders(
            bin.width, [&](int i) { return detail::dark_at(bin, i, y); },
            [&](double cx, double ms) {
                detail::add_to_clusters(clusters, {cx, y + 0.5, ms});
            });
    for (int x = 0; x < bin.width; ++x)
        detail::scan_line_for_finders(
            bin.height, [&](int i) { return detail::dark_at(bin, x, i); },
            [&](double cy, double ms) {
                detail::add_to_clusters(clusters, {x + 0.5, cy, ms});
            });
    if (clusters.empty()) return std::nullopt;

    for (detail::Cluster& cl : clusters) {
        const double ms = cl.ms();
        for (int dx = 0; dx <= 2 && !cl.vertical_ok; ++dx) {
            const int col = static_cast<int>(cl.x()) + (dx == 2 ? -1 : dx);
            if (col < 0 || col >= bin.width) continue;
            const int row = std::clamp(static_cast<int>(cl.y()), 0, bin.height - 1);
            if (detail::cross_check(bin, col, row, 0, 1, ms)) cl.vertical_ok = true;
        }
        for (int d = 0; d <= 2 && !cl.diagonal_ok; ++d) {
            const int col = static_cast<int>(cl.x()) + (d == 2 ? -1 : d);
            const int row = std::clamp(static_cast<int>(cl.y()), 0, bin.height - 1);
            if (col < 0 || col >= bin.width) continue;
            if (detail::cross_check(bin, col, row, 1, 1, ms)) cl.diagonal_ok = true;
        }
    }

    std::vector<const detail::Cluster*> strong;
    for (const auto& cl : clusters)
        if (cl.count >= 2 || cl.vertical_ok || cl.diagonal_ok) strong.push_back(&cl);
    if (strong.size() < 3) return std::nullopt;

    std::sort(strong.begin(), strong.end(), [](const auto* a, const auto* b) {
        if (a->score() != b->score()) return a->score() > b->score();
        if (a->y() != b->y()) return a->y() < b->y();
        return a->x() < b->x();
    });
    if (strong.size() > 8) strong.resize(8);

    auto try_triple = [&](const detail::Cluster* a, const detail::Cluster* b,
                          const detail::Cluster* c) -> std::optional<std::array<FinderCenter, 3>> {
        // the farthest pair is the TR/BL diagonal, the remaining one is TL
        const detail::Cluster* tl = c;
        const detail::Cluster* tr = a;
        const detail::Cluster* bl = b;
        auto dist2 = [](const detail::Cluster* p, const detail::Cluster* q) {
            const double dx = p->x() - q->x(), dy = p->y() - q->y();
            return dx * dx + dy * dy;
        };
        const double dab = dist2(a, b), dac = dist2(a, c), dbc = dist2(b, c);
        if (dac >= dab && dac >= dbc) {
            tl = b; tr = a; bl = c;
        } else if (dbc >= dab && dbc >= dac) {
            tl = a; tr = b; bl = c;
        }
        const double ux = tr->x() - tl->x(), uy = tr->y() - tl->y();
        const double vx = bl->x() - tl->x(), vy = bl->y() - tl->y();
        if (ux * vy - uy * vx < 0) std::swap(tr, bl);

        const double arm_a = std::sqrt(dist2(tl, tr));
        const double arm_b = std::sqrt(dist2(tl, bl));
        const double ms = (tl->ms() + tr->ms() + bl->ms()) / 3.0;
        if (arm_a < 10.0 * ms || arm_b < 10.0 * ms) return std::nullopt;
        if (std::abs(arm_a - arm_b) > 0.25 * std::max(arm_a, arm_b)) return std::nullopt;
        const double nux = (tr->x() - tl->x()), nuy = (tr->y() - tl->y());
        const double nvx = (bl->x() - tl->x()), nvy = (bl->y() - tl->y());
        if (std::abs(nux * nvx + nuy * nvy) > 0.2 * arm_a * arm_b) return std::nullopt;

        const double dim_est = (arm_a + arm_b) / (2.0 * ms) + 7.0;
        int best_side = 0;
        double best_err = 1e9;
        for (int v = kMinVersion; v <= kMaxVersion; ++v) {
            const int side = 17 + 4 * v;
            const double err = std::abs(dim_est - side);
            if (err < best_err) {
                best_err = err;
                best_side = side;
            }
        }
        if (best_err > 2.5) return std::nullopt;

        auto mk = [](const detail::Cluster* cl) {
            return FinderCenter{cl->x(), cl->y(), cl->ms(), cl->score()};
        };
        return std::array<FinderCenter, 3>{mk(tl), mk(tr), mk(bl)};
    };

    std::optional<std::array<FinderCenter, 3>> best;
    int best_score = -1;
    for (std::size_t i = 0; i < strong.size(); ++i)
        for (std::size_t j = i + 1; j < strong.size(); ++j)
            for (std::size_t k = j + 1; k < strong.size(); ++k) {
                const int sc = strong[i]->score() + strong[j]->score() + strong[k]->score();
                if (sc <= best_score) continue;
                if (auto triple = try_triple(strong[i], strong[j], strong[k])) {
                    best = triple;
                    best_score = sc;
                }
            }
    return best;
}

namespace detail {

// Axis-aligned sampling of the module grid given the three finder centers.
inline ModuleMatrix sample_grid(const img::GrayImage& bin, const std::array<FinderCenter, 3>& f,
                                int side) {
    const int version = (side - 17) / 4;
    const double msx = (f[1].x - f[0].x) / (side - 7);
    const double msy = (f[2].y - f[0].y) / (side - 7);
    ModuleMatrix m(version);
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            const double px = f[0].x + (x - 3) * msx;
            const double py = f[0].y + (y - 3) * msy;
            const int ix = std::clamp(static_cast<int>(px), 0, bin.width - 1);
            const int iy = std::clamp(static_cast<int>(py), 0, bin.height - 1);
            m.set(x, y, dark_at(bin, ix, iy));
        }
    }
    return m;
}

// Read both 15-bit format copies; minimum-distance decode over the 32 valid
// words with <= 3 bit errors. An ambiguous minimum is a failure.
inline std::optional<FormatInfo> read_format(const ModuleMatrix& m) {
    const int side = m.side();
    int bits1 = 0, bits2 = 0;
    auto put = [](int& word, int i, bool v) { word |= (v ? 1 : 0) << i; };
    for (int i = 0; i <= 5; ++i) put(bits1, i, m.get(8, i));
    put(bits1, 6, m.get(8, 7));
    put(bits1, 7, m.get(8, 8));
    put(bits1, 8, m.get(7, 8));
    for (int i = 9; i < 15; ++i) put(bits1, i, m.get(14 - i, 8));
    for (int i = 0; i < 8; ++i) put(bits2, i, m.get(side - 1 - i, 8));
    for (int i = 8; i < 15; ++i) put(bits2, i, m.get(8, side - 15 + i));

    int best_dist = 16;
    bool tie = false;
    FormatInfo best{};
    for (EcLevel ec : kAllEcLevels) {
        for (int mask = 0; mask < 8; ++mask) {
            const int cand = format_bits_encode(ec, mask);
            const int d = std::min(__builtin_popcount(static_cast<unsigned>(cand ^ bits1)),
                                   __builtin_popcount(static_cast<unsigned>(cand ^ bits2)));
            if (d < best_dist) {
                best_dist = d;
                best = {ec, mask};
                tie = false;
            } else if (d == best_dist) {
                tie = true;
            }
        }
    }
    if (best_dist > 3 || tie) return std::nullopt;
    return best;
}

class BitReader {
public:
    explicit BitReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}
    std::size_t remaining() const { return bytes_.size() * 8 - pos_; }
    unsigned read(int n) {
        unsigned v = 0;
        for (int i = 0; i < n; ++i) {
            v = (v << 1) | ((bytes_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1u);
            ++pos_;
        }
        return v;
    }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace detail

// Full deterministic decode: binarize (Otsu) when the image is not already
// binary, find finders, sample the grid axis-aligned, decode format, unmask,
// de-interleave, correct each RS block, parse the byte-mode stream.
inline DecodeResult decode_image(const img::GrayImage& image) {
    const img::GrayImage* bin = &image;
    img::GrayImage binarized;
    if (!img::is_binary(image)) {
        const auto threshold = img::otsu_threshold(image);
        if (!threshold) return {DecodeStatus::NoFindersFound, {}};
        binarized = img::binarize(image, *threshold);
        bin = &binarized;
    }

    const auto finders = locate_finders(*bin);
    if (!finders) return {DecodeStatus::NoFindersFound, {}};

    const double ms = ((*finders)[0].module_size + (*finders)[1].module_size +
                       (*finders)[2].module_size) / 3.0;
    const double arm = (((*finders)[1].x - (*finders)[0].x) +
                        ((*finders)[2].y - (*finders)[0].y)) / 2.0;
    const double dim_est = arm / ms + 7.0;
    int side = 21;
    double best_err = 1e9;
    for (int v = kMinVersion; v <= kMaxVersion; ++v) {
        const double err = std::abs(dim_est - (17 + 4 * v));
        if (err < best_err) {
            best_err = err;
            side = 17 + 4 * v;
        }
    }

    const ModuleMatrix grid = detail::sample_grid(*bin, *finders, side);
    const auto format = detail::read_format(grid);
    if (!format) return {DecodeStatus::FormatUndecodable, {}};

    const int version = grid.version();
    const auto function_map = function_module_map(version);
    const int total_cw = kTotalCodewords[static_cast<std::size_t>(version - 1)];
    std::vector<std::uint8_t> codewords(static_cast<std::size_t>(total_cw), 0);
    std::size_t bit_index = 0;
    for_each_data_module(side, function_map, [&](int x, int y) {
        if (bit_index < codewords.size() * 8) {
            const bool bit = grid.get(x, y) ^ mask_bit(format->mask, x, y);
            if (bit)
                codewords[bit_index >> 3] |= static_cast<std::uint8_t>(0x80 >> (bit_index & 7));
        }
        ++bit_index;
    });

    // de-interleave into blocks
    const int nb = num_blocks(version, format->ec);
    const int ecc = ecc_per_block(version, format->ec);
    const int total_data = data_codewords(version, format->ec);
    const int short_len = total_data / nb;
    const int num_long = total_data % nb;
    std::vector<std::vector<std::uint8_t>> bdata(static_cast<std::size_t>(nb)),
        bpar(static_cast<std::size_t>(nb));
    std::size_t idx = 0;
    for (int i = 0; i <= short_len; ++i)
        for (int b = 0; b < nb; ++b) {
            const int len = short_len + (b >= nb - num_long ? 1 : 0);
            if (i < len) bdata[static_cast<std::size_t>(b)].push_back(codewords[idx++]);
        }
    for (int i = 0; i < ecc; ++i)
        for (int b = 0; b < nb; ++b) bpar[static_cast<std::size_t>(b)].push_back(codewords[idx++]);

    std::vector<std::uint8_t> data;
    for (int b = 0; b < nb; ++b) {
        const auto decoded = rs::decode({bdata[static_cast<std::size_t>(b)],
                                         bpar[static_cast<std::size_t>(b)]});
        if (!decoded) return {DecodeStatus::UncorrectableBlock, {}};
        data.insert(data.end(), decoded->data.begin(), decoded->data.end());
    }

    detail::BitReader br(data);
    if (br.remaining() < 4) return {DecodeStatus::MalformedBitstream, {}};
    if (br.read(4) != 0x4) return {DecodeStatus::MalformedBitstream, {}};
    const int len_bits = length_field_bits(version);
    if (br.remaining() < static_cast<std::size_t>(len_bits))
        return {DecodeStatus::MalformedBitstream, {}};
    const unsigned count = br.read(len_bits);
    if (br.remaining() < static_cast<std::size_t>(count) * 8)
        return {DecodeStatus::MalformedBitstream, {}};
    std::string text(count, '\0');
    for (unsigned i = 0; i < count; ++i) text[i] = static_cast<char>(br.read(8));
    return {DecodeStatus::Success, std::move(text)};
}

// Score a decode against the two class constants. Success iff exactly one
// match string occurs as a substring; decode failures and double matches
// count as misclassification (nullopt).
inline std::optional<int> detect_constant(const DecodeResult& result,
                                          const std::pair<std::string, std::string>& constants) {
    if (!result.ok()) return std::nullopt;
    const bool a = result.text.find(constants.first) != std::string::npos;
    const bool b = result.text.find(constants.second) != std::string::npos;
    if (a == b) return std::nullopt;
    return a ? 0 : 1;
}

}  // namespace qrlab::qr

#endif  // QRLAB_QR_DECODER_HPP
