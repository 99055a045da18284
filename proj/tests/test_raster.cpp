#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "qrlab/image.hpp"
#include "qrlab/rng.hpp"

using namespace qrlab;
using img::GrayImage;

namespace {

// Direct (non-separable) 2-D Gaussian convolution with edge clamping; the
// kernel is the product of normalized 1-D kernels.
GrayImage blur_oracle(const GrayImage& src, double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k1(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k1[static_cast<std::size_t>(i + radius)] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += k1[static_cast<std::size_t>(i + radius)];
    }
    for (double& w : k1) w /= sum;

    GrayImage out(src.width, src.height);
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x) {
            double acc = 0.0;
            for (int dy = -radius; dy <= radius; ++dy)
                for (int dx = -radius; dx <= radius; ++dx) {
                    const int sx = std::clamp(x + dx, 0, src.width - 1);
                    const int sy = std::clamp(y + dy, 0, src.height - 1);
                    acc += k1[static_cast<std::size_t>(dx + radius)] *
                           k1[static_cast<std::size_t>(dy + radius)] * src.at(sx, sy);
                }
            out.at(x, y) = acc;
        }
    return out;
}

// Independent scalar bilinear sampler.
double bilinear_oracle(const GrayImage& s, double x, double y) {
    x = std::min(std::max(x, 0.0), s.width - 1.0);
    y = std::min(std::max(y, 0.0), s.height - 1.0);
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, s.width - 1);
    const int y1 = std::min(y0 + 1, s.height - 1);
    const double a = x - x0, b = y - y0;
    return s.at(x0, y0) * (1 - a) * (1 - b) + s.at(x1, y0) * a * (1 - b) +
           s.at(x0, y1) * (1 - a) * b + s.at(x1, y1) * a * b;
}

GrayImage random_image(Rng& rng, int w, int h) {
    GrayImage im(w, h);
    for (double& v : im.pixels) v = rng.uniform_double();
    return im;
}

}  // namespace

TEST(Blur, SigmaZeroIsIdentity) {
    Rng rng(1);
    const auto im = random_image(rng, 17, 13);
    EXPECT_EQ(img::gaussian_blur(im, 0.0), im);
}

TEST(Blur, ConstantImagePreserved) {
    const GrayImage im(30, 20, 0.37);
    const auto out = img::gaussian_blur(im, 3.0);
    for (double v : out.pixels) EXPECT_NEAR(v, 0.37, 1e-9);
}

TEST(Blur, ImpulseMatchesDirectConvolutionOracle) {
    GrayImage im(41, 41, 0.0);
    im.at(20, 20) = 1.0;
    const auto fast = img::gaussian_blur(im, 2.0);
    const auto slow = blur_oracle(im, 2.0);
    for (std::size_t i = 0; i < fast.pixels.size(); ++i)
        ASSERT_NEAR(fast.pixels[i], slow.pixels[i], 1e-9);
}

TEST(Blur, RandomImageMatchesOracle) {
    Rng rng(42);
    const auto im = random_image(rng, 23, 19);
    const auto fast = img::gaussian_blur(im, 1.7);
    const auto slow = blur_oracle(im, 1.7);
    for (std::size_t i = 0; i < fast.pixels.size(); ++i)
        ASSERT_NEAR(fast.pixels[i], slow.pixels[i], 1e-9);
}

TEST(Blur, InteriorMassPreservesMean) {
    GrayImage im(64, 64, 0.5);
    for (int y = 28; y < 36; ++y)
        for (int x = 28; x < 36; ++x) im.at(x, y) = 0.9;
    double before = 0, after = 0;
    const auto out = img::gaussian_blur(im, 2.0);
    for (double v : im.pixels) before += v;
    for (double v : out.pixels) after += v;
    EXPECT_NEAR(before / im.pixels.size(), after / im.pixels.size(), 1e-6);
}

TEST(Warp, ZeroFieldIsIdentity) {
    Rng rng(2);
    const auto im = random_image(rng, 15, 11);
    img::DisplacementField f;
    f.dx.assign(im.pixels.size(), 0.0);
    f.dy.assign(im.pixels.size(), 0.0);
    EXPECT_EQ(img::warp(im, f), im);
}

TEST(Warp, UnitTranslationDuplicatesEdge) {
    Rng rng(3);
    const auto im = random_image(rng, 9, 7);
    img::DisplacementField f;
    f.dx.assign(im.pixels.size(), 1.0);
    f.dy.assign(im.pixels.size(), 0.0);
    const auto out = img::warp(im, f);
    for (int y = 0; y < im.height; ++y) {
        for (int x = 0; x < im.width - 1; ++x) EXPECT_EQ(out.at(x, y), im.at(x + 1, y));
        EXPECT_EQ(out.at(im.width - 1, y), im.at(im.width - 1, y));
    }
}

TEST(Warp, RandomSmoothFieldMatchesScalarOracle) {
    GrayImage board(32, 32);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) board.at(x, y) = ((x / 4 + y / 4) % 2) ? 1.0 : 0.0;

    Rng rng(4);
    img::DisplacementField f;
    f.dx.resize(board.pixels.size());
    f.dy.resize(board.pixels.size());
    for (std::size_t i = 0; i < f.dx.size(); ++i) {
        f.dx[i] = 3.0 * (rng.uniform_double() - 0.5);
        f.dy[i] = 3.0 * (rng.uniform_double() - 0.5);
    }
    f.dx = img::blur_grid(f.dx, 32, 32, 2.0);
    f.dy = img::blur_grid(f.dy, 32, 32, 2.0);

    const auto out = img::warp(board, f);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * 32 + x;
            ASSERT_NEAR(out.at(x, y), bilinear_oracle(board, x + f.dx[i], y + f.dy[i]), 1e-9);
        }
}

TEST(Otsu, BimodalSeparatesPopulations) {
    GrayImage im(100, 10);
    for (std::size_t i = 0; i < im.pixels.size(); ++i)
        im.pixels[i] = (i % 10 < 7) ? 0.2 : 0.8;
    const auto t = img::otsu_threshold(im);
    ASSERT_TRUE(t.has_value());
    EXPECT_GT(*t, 0.2);
    EXPECT_LT(*t, 0.8);
    const auto bin = img::binarize(im, *t);
    for (std::size_t i = 0; i < im.pixels.size(); ++i)
        EXPECT_EQ(bin.pixels[i], (i % 10 < 7) ? 0.0 : 1.0);
}

TEST(Otsu, ConstantImageIsDegenerate) {
    EXPECT_FALSE(img::otsu_threshold(GrayImage(8, 8, 0.4)).has_value());
}

TEST(Otsu, MatchesExhaustiveVarianceSearch) {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        GrayImage im(40, 30);
        // two noisy populations plus outliers
        for (double& v : im.pixels) {
            const double u = rng.uniform_double();
            if (u < 0.5) v = img::clamp01(0.25 + 0.1 * (rng.uniform_double() - 0.5));
            else if (u < 0.95) v = img::clamp01(0.7 + 0.2 * (rng.uniform_double() - 0.5));
            else v = rng.uniform_double();
        }
        const auto got = img::otsu_threshold(im);
        ASSERT_TRUE(got.has_value());

        // brute force in floating point over all 256 candidate bins
        std::array<double, 256> hist{};
        for (double v : im.pixels) hist[static_cast<std::size_t>(std::lround(v * 255.0))] += 1.0;
        const double total = static_cast<double>(im.pixels.size());
        double best_var = -1.0;
        int first = -1, last = -1;
        for (int t = 0; t < 255; ++t) {
            double w0 = 0, m0 = 0;
            for (int b = 0; b <= t; ++b) {
                w0 += hist[static_cast<std::size_t>(b)];
                m0 += b * hist[static_cast<std::size_t>(b)];
            }
            const double w1 = total - w0;
            if (w0 == 0 || w1 == 0) continue;
            double m1 = 0;
            for (int b = t + 1; b < 256; ++b) m1 += b * hist[static_cast<std::size_t>(b)];
            const double mu0 = m0 / w0, mu1 = m1 / w1;
            const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
            if (var > best_var + 1e-6) {
                best_var = var;
                first = last = t;
            } else if (std::abs(var - best_var) <= 1e-6) {
                last = t;
            }
        }
        const int expect_bin = (first + last) / 2;
        EXPECT_NEAR(*got, (expect_bin + 0.5) / 255.0, 1.0 / 255.0) << "trial " << trial;
    }
}

TEST(Resize, SameSizeIsIdentity) {
    Rng rng(6);
    const auto im = random_image(rng, 12, 18);
    EXPECT_EQ(img::resize_bilinear(im, 12, 18), im);
    EXPECT_EQ(img::resize_nearest(im, 12, 18), im);
}

TEST(Resize, ConstantStaysConstant) {
    const GrayImage im(2, 2, 0.55);
    const auto out = img::resize_bilinear(im, 9, 9);
    EXPECT_EQ(out.width, 9);
    for (double v : out.pixels) EXPECT_NEAR(v, 0.55, 1e-12);
}

TEST(Resize, DownOfUpApproximatesOriginalForSmoothImages) {
    Rng rng(7);
    auto im = random_image(rng, 24, 24);
    im = img::gaussian_blur(im, 2.5);  // smooth content
    const auto up = img::resize_bilinear(im, 96, 96);
    const auto down = img::resize_bilinear(up, 24, 24);
    for (std::size_t i = 0; i < im.pixels.size(); ++i)
        ASSERT_NEAR(down.pixels[i], im.pixels[i], 0.02);
}

TEST(Range, OperationsPreserveUnitInterval) {
    Rng rng(8);
    auto im = random_image(rng, 33, 21);
    img::DisplacementField f;
    f.dx.assign(im.pixels.size(), 2.25);
    f.dy.assign(im.pixels.size(), -1.75);
    for (const auto& out :
         {img::gaussian_blur(im, 1.2), img::warp(im, f), img::resize_bilinear(im, 50, 40)})
        for (double v : out.pixels) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
}

TEST(Pgm, RoundTripIsBitExact) {
    Rng rng(9);
    GrayImage im(37, 23);
    for (double& v : im.pixels)
        v = static_cast<double>(rng.uniform_index(256)) / 255.0;  // representable values
    const auto path = std::filesystem::temp_directory_path() / "qrlab_pgm_roundtrip.pgm";
    img::write_pgm(im, path.string());
    const auto back = img::read_pgm(path.string());
    EXPECT_EQ(back, im);
    std::filesystem::remove(path);
}

TEST(Pgm, HeaderWithCommentsParses) {
    const auto path = std::filesystem::temp_directory_path() / "qrlab_pgm_comment.pgm";
    {
        std::FILE* f = std::fopen(path.string().c_str(), "wb");
        std::fputs("P5\n# a comment\n2 2\n255\n", f);
        const unsigned char px[4] = {0, 85, 170, 255};
        std::fwrite(px, 1, 4, f);
        std::fclose(f);
    }
    const auto im = img::read_pgm(path.string());
    EXPECT_EQ(im.width, 2);
    EXPECT_EQ(im.at(1, 1), 1.0);
    EXPECT_EQ(im.at(1, 0), 85.0 / 255.0);
    std::filesystem::remove(path);
}
