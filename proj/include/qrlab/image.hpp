#ifndef QRLAB_IMAGE_HPP
#define QRLAB_IMAGE_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrlab::img {

// Grayscale raster with unit-interval intensities. 8-bit quantization only
// happens at the PGM boundary.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;  // row-major, [0,1]

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    double at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    double& at(int x, int y) {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }

    bool operator==(const GrayImage&) const = default;
};

struct DisplacementField {
    std::vector<double> dx;  // pixels, same dims as the image
    std::vector<double> dy;
};

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

inline std::vector<double> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = w;
        sum += w;
    }
    for (double& w : kernel) w /= sum;
    return kernel;
}

// Separable Gaussian convolution of a raw row-major grid, kernel radius
// ceil(3*sigma), edges clamped. No range clamping: also used for signed
// displacement fields.
inline std::vector<double> blur_grid(const std::vector<double>& src, int w, int h, double sigma) {
    if (sigma < 0) throw std::invalid_argument("blur: negative sigma");
    if (sigma == 0.0) return src;
    const auto kernel = gaussian_kernel(sigma);
    const int radius = (static_cast<int>(kernel.size()) - 1) / 2;

    std::vector<double> tmp(src.size()), out(src.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int xi = std::clamp(x + i, 0, w - 1);
                acc += kernel[static_cast<std::size_t>(i + radius)] *
                       src[static_cast<std::size_t>(y) * w + xi];
            }
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int yi = std::clamp(y + i, 0, h - 1);
                acc += kernel[static_cast<std::size_t>(i + radius)] *
                       tmp[static_cast<std::size_t>(yi) * w + x];
            }
            out[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return out;
}

// Image-valued blur; convex combination of in-range inputs, clamped against
// rounding spill.
inline GrayImage gaussian_blur(const GrayImage& src, double sigma) {
    if (sigma == 0.0) return src;
    GrayImage out(src.width, src.height);
    out.pixels = blur_grid(src.pixels, src.width, src.height, sigma);
    for (double& v : out.pixels) v = clamp01(v);
    return out;
}

// 1-D Gaussian smoothing of a plain vector, same kernel and edge rules.
inline std::vector<double> gaussian_blur_1d(const std::vector<double>& src, double sigma) {
    if (sigma <= 0.0) return src;
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = w;
        sum += w;
    }
    for (double& w : kernel) w /= sum;

    const int n = static_cast<int>(src.size());
    std::vector<double> out(src.size());
    for (int x = 0; x < n; ++x) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
            const int xi = std::clamp(x + i, 0, n - 1);
            acc += kernel[static_cast<std::size_t>(i + radius)] * src[static_cast<std::size_t>(xi)];
        }
        out[static_cast<std::size_t>(x)] = acc;
    }
    return out;
}

inline double bilinear_sample(const GrayImage& src, double x, double y) {
    const double sx = std::clamp(x, 0.0, static_cast<double>(src.width - 1));
    const double sy = std::clamp(y, 0.0, static_cast<double>(src.height - 1));
    const int x0 = static_cast<int>(sx);
    const int y0 = static_cast<int>(sy);
    const int x1 = std::min(x0 + 1, src.width - 1);
    const int y1 = std::min(y0 + 1, src.height - 1);
    const double fx = sx - x0;
    const double fy = sy - y0;
    const double top = (1.0 - fx) * src.at(x0, y0) + fx * src.at(x1, y0);
    const double bot = (1.0 - fx) * src.at(x0, y1) + fx * src.at(x1, y1);
    return (1.0 - fy) * top + fy * bot;
}

// out(x,y) = bilinear sample of src at (x + dx, y + dy), clamped at edges.
inline GrayImage warp(const GrayImage& src, const DisplacementField& field) {
    const std::size_t n = static_cast<std::size_t>(src.width) * src.height;
    if (field.dx.size() != n || field.dy.size() != n)
        throw std::invalid_argument("warp: field dims mismatch");
    GrayImage out(src.width, src.height);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * src.width + x;
            out.pixels[i] = clamp01(bilinear_sample(src, x + field.dx[i], y + field.dy[i]));
        }
    }
    return out;
}

inline GrayImage resize_bilinear(const GrayImage& src, int new_w, int new_h) {
    if (new_w < 1 || new_h < 1) throw std::invalid_argument("resize: target < 1");
    if (new_w == src.width && new_h == src.height) return src;
    GrayImage out(new_w, new_h);
    const double sx = static_cast<double>(src.width) / new_w;
    const double sy = static_cast<double>(src.height) / new_h;
    for (int y = 0; y < new_h; ++y) {
        for (int x = 0; x < new_w; ++x) {
            const double u = (x + 0.5) * sx - 0.5;
            const double v = (y + 0.5) * sy - 0.5;
            out.at(x, y) = clamp01(bilinear_sample(src, u, v));
        }
    }
    return out;
}

inline GrayImage resize_nearest(const GrayImage& src, int new_w, int new_h) {
    if (new_w < 1 || new_h < 1) throw std::invalid_argument("resize: target < 1");
    if (new_w == src.width && new_h == src.height) return src;
    GrayImage out(new_w, new_h);
    for (int y = 0; y < new_h; ++y) {
        const int v = std::min(static_cast<int>((y + 0.5) * src.height / new_h), src.height - 1);
        for (int x = 0; x < new_w; ++x) {
            const int u = std::min(static_cast<int>((x + 0.5) * src.width / new_w), src.width - 1);
            out.at(x, y) = src.at(u, v);
        }
    }
    return out;
}

// Otsu threshold over a 256-bin histogram (bin = lround(v * 255)), done in
// exact integer arithmetic. Ties along the plateau of maximal between-class
// variance resolve to the plateau midpoint. Returns nullopt when the
// histogram is degenerate (a single occupied bin).
inline std::optional<double> otsu_threshold(const GrayImage& src) {
    std::array<std::int64_t, 256> hist{};
    for (double v : src.pixels)
        ++hist[static_cast<std::size_t>(std::lround(clamp01(v) * 255.0))];

    std::int64_t total = 0, total_mass = 0;
    int occupied = 0;
    for (int b = 0; b < 256; ++b) {
        total += hist[static_cast<std::size_t>(b)];
        total_mass += static_cast<std::int64_t>(b) * hist[static_cast<std::size_t>(b)];
        if (hist[static_cast<std::size_t>(b)] > 0) ++occupied;
    }
    if (occupied <= 1) return std::nullopt;

    // between-class variance at t compared as N^2/D with exact cross-products
    __int128 best_num2 = -1;
    __int128 best_den = 1;
    int first_best = -1, last_best = -1;
    std::int64_t w0 = 0, m0 = 0;
    for (int t = 0; t < 255; ++t) {
        w0 += hist[static_cast<std::size_t>(t)];
        m0 += static_cast<std::int64_t>(t) * hist[static_cast<std::size_t>(t)];
        const std::int64_t w1 = total - w0;
        if (w0 == 0 || w1 == 0) continue;
        const __int128 num = static_cast<__int128>(m0) * total -
                             static_cast<__int128>(w0) * total_mass;
        const __int128 num2 = num * num;
        const __int128 den = static_cast<__int128>(w0) * w1;
        const __int128 lhs = num2 * best_den;
        const __int128 rhs = best_num2 * den;
        if (lhs > rhs) {
            best_num2 = num2;
            best_den = den;
            first_best = last_best = t;
        } else if (lhs == rhs) {
            last_best = t;
        }
    }
    if (first_best < 0) return std::nullopt;
    const int bin = (first_best + last_best) / 2;
    return (bin + 0.5) / 255.0;
}

inline GrayImage binarize(const GrayImage& src, double threshold) {
    GrayImage out(src.width, src.height);
    for (std::size_t i = 0; i < src.pixels.size(); ++i)
        out.pixels[i] = src.pixels[i] <= threshold ? 0.0 : 1.0;
    return out;
}

inline bool is_binary(const GrayImage& src) {
    for (double v : src.pixels)
        if (v != 0.0 && v != 1.0) return false;
    return true;
}

// --- PGM (P5, maxval 255) -------------------------------------------------

inline void write_pgm(const GrayImage& src, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("pgm: cannot open for writing: " + path);
    f << "P5\n" << src.width << " " << src.height << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(src.width));
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x)
            row[static_cast<std::size_t>(x)] =
                static_cast<unsigned char>(std::lround(clamp01(src.at(x, y)) * 255.0));
        f.write(reinterpret_cast<const char*>(row.data()), src.width);
    }
    if (!f) throw std::runtime_error("pgm: write failed: " + path);
}

inline GrayImage read_pgm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("pgm: cannot open: " + path);
    auto next_token = [&f, &path]() {
        std::string tok;
        int c;
        while ((c = f.get()) != EOF) {
            if (c == '#') {
                while ((c = f.get()) != EOF && c != '\n') {}
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) return tok;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
        if (tok.empty()) throw std::runtime_error("pgm: truncated header: " + path);
        return tok;
    };
    if (next_token() != "P5") throw std::runtime_error("pgm: not a P5 file: " + path);
    const int w = std::stoi(next_token());
    const int h = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (w < 1 || h < 1 || maxval != 255)
        throw std::runtime_error("pgm: unsupported header: " + path);
    GrayImage out(w, h);
    std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h);
    f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (f.gcount() != static_cast<std::streamsize>(buf.size()))
        throw std::runtime_error("pgm: truncated pixel data: " + path);
    for (std::size_t i = 0; i < buf.size(); ++i)
        out.pixels[i] = buf[i] / 255.0;
    return out;
}

}  // namespace qrlab::img

#endif  // QRLAB_IMAGE_HPP
