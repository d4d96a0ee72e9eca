#include "kgamma/random.hpp"

#include <cmath>
#include <stdexcept>

namespace kgamma {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kSplitSalt = 0xD2B74407B1CE6E93ULL;

// splitmix64 finalizer (Steele/Lea/Flood; Vigna's fixed-increment variant).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

RandomStream::RandomStream(std::uint64_t seed)
    : key_(mix64(seed + kGolden)), seed_(seed) {}

RandomStream::RandomStream(std::uint64_t key, std::uint64_t seed,
                           std::vector<std::uint32_t> path)
    : key_(key), seed_(seed), path_(std::move(path)) {}

RandomStream RandomStream::split(std::uint32_t index) const {
    std::uint64_t child = mix64(key_ ^ (kSplitSalt * (std::uint64_t(index) + 1)));
    auto path = path_;
    path.push_back(index);
    return RandomStream(child, seed_, std::move(path));
}

std::uint64_t RandomStream::next_u64() {
    counter_ += kGolden;
    return mix64(counter_ ^ key_);
}

double RandomStream::uniform() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_pos() {
    return double((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RandomStream::uniform(double a, double b) {
    return a + (b - a) * uniform();
}

double RandomStream::exponential() {
    return -std::log(uniform_pos());
}

double RandomStream::normal() {
    // Basic Box-Muller; the sine twin is discarded so each call consumes
    // exactly two uniforms, which keeps replay trivial.
    double u1 = uniform_pos();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double RandomStream::gamma(double shape) {
    if (!(shape > 0.0)) throw std::domain_error("gamma: shape must be > 0");
    if (shape < 1.0) {
        // Boost to shape+1 and correct with U^{1/shape}.
        double g = gamma(shape + 1.0);
        return g * std::pow(uniform_pos(), 1.0 / shape);
    }
    // Marsaglia & Tsang (2000).
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_pos();
        if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::uint64_t RandomStream::poisson(double mean) {
    if (!(mean >= 0.0)) throw std::domain_error("poisson: mean must be >= 0");
    if (mean == 0.0) return 0;
    if (mean < 12.0) {
        // Knuth's product-of-uniforms method.
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform_pos();
        } while (p > limit);
        return k - 1;
    }
    // Hormann's PTRS transformed rejection; exact for all means used here.
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
        const double u = uniform() - 0.5;
        const double v = uniform_pos();
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return std::uint64_t(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            kf * log_mean - mean - std::lgamma(kf + 1.0))
            return std::uint64_t(kf);
    }
}

}  // namespace kgamma
