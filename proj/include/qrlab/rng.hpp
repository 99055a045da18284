#ifndef QRLAB_RNG_HPP
#define QRLAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace qrlab {

// SplitMix64 finalizer. Used both as a bit mixer and to derive independent
// sub-seeds, so records of a dataset can be regenerated in isolation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Seed splitting rule: fold each component into the state with one mixer
// round. seed_chain(master, a, b, ...) == seed_chain(seed_chain(master, a), b, ...).
inline std::uint64_t seed_chain(std::uint64_t seed) { return seed; }

template <typename... Rest>
std::uint64_t seed_chain(std::uint64_t seed, std::uint64_t part, Rest... rest) {
    return seed_chain(splitmix64(seed ^ splitmix64(part)), rest...);
}

// Seeded generator with fixed, implementation-independent distributions.
// std::uniform_*_distribution is not pinned by the standard, so every
// distribution here is spelled out; outputs are reproducible everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, n) via 128-bit multiply-shift.
    std::uint64_t uniform_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the pair's second value is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform_double();
        double u2 = uniform_double();
        if (u1 < 1e-300) u1 = 1e-300;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace qrlab

#endif  // QRLAB_RNG_HPP
