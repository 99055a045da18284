#ifndef QRLAB_DEGRADE_HPP
#define QRLAB_DEGRADE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrlab/image.hpp"
#include "qrlab/qr_code.hpp"
#include "qrlab/qr_encoder.hpp"
#include "qrlab/rng.hpp"

namespace qrlab::degrade {

struct NonBinaryInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class NoiseKind { Inversion, RandomDistortion, RuledSurface, FgBgSelection };

// Rendering regimes: module inversion happens on the bare matrix at one
// pixel per module; the realistic models need sub-module resolution and a
// quiet zone for the decoder baseline.
inline constexpr int kInversionScale = 1;
inline constexpr int kInversionQuiet = 0;
inline constexpr int kRealisticScale = 8;
inline constexpr int kRealisticQuiet = 4;

// Fixed smoothing of the 1-D ruled-surface displacement.
inline constexpr double kRuledSmoothingSigma = 20.0;
inline constexpr double kDefaultMaxDelta = 5.0;

// One degradation: kind + parameters + seed, a pure function of its inputs.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::Inversion;
    double percent = 0.0;                 // Inversion: fraction of modules, [0,100]
    double sigma = 0.0;                   // RandomDistortion smoothing, pixels
    double maxdelta = kDefaultMaxDelta;   // RandomDistortion amplitude, pixels
    double mag = 0.0;                     // RuledSurface amplitude, pixels
    std::uint64_t seed = 0;

    std::string to_string() const;
    static std::optional<NoiseSpec> parse(const std::string& text);
};

namespace detail {

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace detail

inline std::string NoiseSpec::to_string() const {
    switch (kind) {
        case NoiseKind::Inversion:
            return "inversion:p=" + detail::format_number(percent);
        case NoiseKind::RandomDistortion:
            return "rdist:sigma=" + detail::format_number(sigma) +
                   ",maxdelta=" + detail::format_number(maxdelta);
        case NoiseKind::RuledSurface:
            return "ruled:mag=" + detail::format_number(mag);
        case NoiseKind::FgBgSelection:
            return "fgbg";
    }
    return {};
}

inline std::optional<NoiseSpec> NoiseSpec::parse(const std::string& text) {
    NoiseSpec spec;
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);

    if (head == "fgbg") {
        spec.kind = NoiseKind::FgBgSelection;
        return rest.empty() ? std::optional<NoiseSpec>(spec) : std::nullopt;
    }
    if (head == "inversion") spec.kind = NoiseKind::Inversion;
    else if (head == "rdist") spec.kind = NoiseKind::RandomDistortion;
    else if (head == "ruled") spec.kind = NoiseKind::RuledSurface;
    else return std::nullopt;

    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string item = rest.substr(0, comma);
        rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string::npos) return std::nullopt;
        const std::string key = item.substr(0, eq);
        double value = 0.0;
        try {
            value = std::stod(item.substr(eq + 1));
        } catch (...) {
            return std::nullopt;
        }
        if (key == "p" && spec.kind == NoiseKind::Inversion) spec.percent = value;
        else if (key == "sigma" && spec.kind == NoiseKind::RandomDistortion) spec.sigma = value;
        else if (key == "maxdelta" && spec.kind == NoiseKind::RandomDistortion) spec.maxdelta = value;
        else if (key == "mag" && spec.kind == NoiseKind::RuledSurface) spec.mag = value;
        else return std::nullopt;
    }
    if (spec.percent < 0 || spec.percent > 100 || spec.sigma < 0 || spec.maxdelta < 0 ||
        spec.mag < 0)
        return std::nullopt;
    return spec;
}

// Complement exactly round(percent/100 * side^2) distinct modules, drawn
// uniformly without replacement over the whole grid, finders included.
inline qr::ModuleMatrix invert_modules(const qr::ModuleMatrix& matrix, double percent,
                                       std::uint64_t seed) {
    if (percent < 0 || percent > 100) throw std::invalid_argument("invert: percent out of range");
    const int side = matrix.side();
    const std::int64_t total = static_cast<std::int64_t>(side) * side;
    const auto budget = static_cast<std::int64_t>(std::llround(percent / 100.0 * total));

    qr::ModuleMatrix out = matrix;
    if (budget == 0) return out;

    // partial Fisher-Yates: first `budget` slots end up with the sample
    std::vector<std::int32_t> cells(static_cast<std::size_t>(total));
    for (std::int64_t i = 0; i < total; ++i) cells[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(i);
    Rng rng(seed);
    for (std::int64_t k = 0; k < budget; ++k) {
        const auto j = k + static_cast<std::int64_t>(
            rng.uniform_index(static_cast<std::uint64_t>(total - k)));
        std::swap(cells[static_cast<std::size_t>(k)], cells[static_cast<std::size_t>(j)]);
        const std::int32_t cell = cells[static_cast<std::size_t>(k)];
        out.flip(cell % side, cell / side);
    }
    return out;
}

namespace detail {

inline std::vector<double> normal_grid(Rng& rng, std::size_t n) {
    std::vector<double> g(n);
    for (double& v : g) v = rng.normal();
    return g;
}

// Scale so the maximum absolute value is `amplitude` (exactly, within fp).
inline void normalize_amplitude(std::vector<double>& g, double amplitude) {
    double max_abs = 0.0;
    for (double v : g) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) return;
    const double k = amplitude / max_abs;
    for (double& v : g) v *= k;
}

}  // namespace detail

// Ink-spread style distortion: two independent Gaussian noise grids are
// smoothed with gaussian_blur(sigma), normalized to peak amplitude maxdelta,
// and applied as a displacement field.
inline img::GrayImage random_distortion(const img::GrayImage& image, double sigma,
                                        double maxdelta, std::uint64_t seed) {
    if (sigma <= 0) throw std::invalid_argument("rdist: sigma must be positive");
    if (maxdelta < 0) throw std::invalid_argument("rdist: negative maxdelta");
    if (maxdelta == 0) return image;

    const std::size_t n = image.pixels.size();
    Rng rng(seed);
    img::DisplacementField field;
    field.dx = img::blur_grid(detail::normal_grid(rng, n), image.width, image.height, sigma);
    field.dy = img::blur_grid(detail::normal_grid(rng, n), image.width, image.height, sigma);
    detail::normalize_amplitude(field.dx, maxdelta);
    detail::normalize_amplitude(field.dy, maxdelta);
    return img::warp(image, field);
}

// Paper-curl distortion: one smoothed 1-D noise vector produces a vertical
// shift per column (dy varies with x only, dx = 0).
inline img::GrayImage ruled_surface(const img::GrayImage& image, double mag, std::uint64_t seed) {
    if (mag < 0) throw std::invalid_argument("ruled: negative mag");
    if (mag == 0) return image;

    Rng rng(seed);
    std::vector<double> shift(static_cast<std::size_t>(image.width));
    for (double& v : shift) v = rng.normal();
    shift = img::gaussian_blur_1d(shift, kRuledSmoothingSigma);
    detail::normalize_amplitude(shift, mag);

    img::DisplacementField field;
    field.dx.assign(image.pixels.size(), 0.0);
    field.dy.resize(image.pixels.size());
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            field.dy[static_cast<std::size_t>(y) * image.width + x] =
                shift[static_cast<std::size_t>(x)];
    return img::warp(image, field);
}

namespace detail {

// Normalized sum of smoothed white-noise grids at scales {4, 16, 64} px,
// mapped to [0, 1].
inline std::vector<double> multiscale_noise(Rng& rng, int w, int h) {
    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<double> sum(n, 0.0);
    for (double scale : {4.0, 16.0, 64.0}) {
        const auto layer = img::blur_grid(normal_grid(rng, n), w, h, scale);
        for (std::size_t i = 0; i < n; ++i) sum[i] += layer[i];
    }
    double lo = sum[0], hi = sum[0];
    for (double v : sum) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi == lo) return std::vector<double>(n, 0.5);
    for (double& v : sum) v = (v - lo) / (hi - lo);
    return sum;
}

}  // namespace detail

// Luminance defects: dark modules are repainted with a multiscale field in
// [0.05, 0.45] and light modules with one in [0.55, 0.95]. The bands stay
// disjoint around 0.5, so Otsu binarization recovers the input exactly.
inline img::GrayImage fgbg_selection(const img::GrayImage& image, std::uint64_t seed) {
    if (!img::is_binary(image)) throw NonBinaryInput("fgbg: input must be a binary render");

    Rng rng(seed);
    const auto fg = detail::multiscale_noise(rng, image.width, image.height);
    const auto bg = detail::multiscale_noise(rng, image.width, image.height);
    img::GrayImage out(image.width, image.height);
    for (std::size_t i = 0; i < image.pixels.size(); ++i)
        out.pixels[i] = image.pixels[i] == 0.0 ? 0.05 + 0.4 * fg[i] : 0.55 + 0.4 * bg[i];
    return out;
}

// Render a matrix under one noise spec, in the regime the spec calls for:
// inversion on the bare 1 px/module matrix, realistic noise on a scale-8
// render with a 4-module quiet zone.
inline img::GrayImage render_with_noise(const qr::ModuleMatrix& matrix, const NoiseSpec& spec) {
    switch (spec.kind) {
        case NoiseKind::Inversion:
            return qr::render(invert_modules(matrix, spec.percent, spec.seed), kInversionScale,
                              kInversionQuiet);
        case NoiseKind::RandomDistortion:
            return random_distortion(qr::render(matrix, kRealisticScale, kRealisticQuiet),
                                     spec.sigma, spec.maxdelta, spec.seed);
        case NoiseKind::RuledSurface:
            return ruled_surface(qr::render(matrix, kRealisticScale, kRealisticQuiet), spec.mag,
                                 spec.seed);
        case NoiseKind::FgBgSelection:
            return fgbg_selection(qr::render(matrix, kRealisticScale, kRealisticQuiet), spec.seed);
    }
    throw std::logic_error("degrade: unknown noise kind");
}

}  // namespace qrlab::degrade

#endif  // QRLAB_DEGRADE_HPP
