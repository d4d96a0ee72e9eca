#pragma once

#include <cstdint>
#include <vector>

namespace kgamma {

// Counter-based splittable stream built on the splitmix64 output function.
// Draws are a pure function of (seed, path, counter): the same seed and split
// path reproduce identical draws bit for bit, and distinct paths give
// statistically independent streams. Splitting never perturbs the parent.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed);

    // Child stream addressed by (path..., index).
    RandomStream split(std::uint32_t index) const;

    std::uint64_t next_u64();

    double uniform();                      // [0, 1)
    double uniform_pos();                  // (0, 1]
    double uniform(double a, double b);    // [a, b)
    double exponential();                  // rate 1
    double normal();                       // standard normal, Box-Muller
    double gamma(double shape);            // scale 1, Marsaglia-Tsang
    std::uint64_t poisson(double mean);    // exact; Knuth / transformed rejection

    std::uint64_t seed() const { return seed_; }
    const std::vector<std::uint32_t>& path() const { return path_; }

  private:
    RandomStream(std::uint64_t key, std::uint64_t seed, std::vector<std::uint32_t> path);

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::uint64_t seed_;
    std::vector<std::uint32_t> path_;
};

}  // namespace kgamma
