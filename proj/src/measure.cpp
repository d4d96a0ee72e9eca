#include "kgamma/measure.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "kgamma/special.hpp"

namespace kgamma {

bool WeightedConfiguration::pinpointing() const {
    // O(n log n) check on sorted positions; equal points must be adjacent.
    std::vector<Point> pos;
    pos.reserve(atoms_.size());
    for (const auto& a : atoms_) pos.push_back(a.position);
    std::sort(pos.begin(), pos.end());
    return std::adjacent_find(pos.begin(), pos.end()) == pos.end();
}

double LevyIntensity::tail_mass(double eps) { return exp_integral_e1(eps); }

double sample_truncated_mass(double eps, RandomStream& stream) {
    if (!(eps > 0.0)) throw std::domain_error("sample_truncated_mass: eps must be > 0");
    const double tail_eps = exp_integral_e1(eps);
    double p_low = 0.0;
    if (eps < 1.0) p_low = (tail_eps - exp_integral_e1(1.0)) / tail_eps;
    if (stream.uniform() < p_low) {
        const double log_range = std::log(1.0 / eps);
        for (;;) {
            const double s = eps * std::exp(stream.uniform() * log_range);
            if (stream.uniform() < std::exp(-s)) return s;
        }
    }
    const double lo = std::max(eps, 1.0);
    for (;;) {
        const double s = lo + stream.exponential();
        if (stream.uniform() * s < 1.0) return s;
    }
}

WeightedConfiguration sample_gamma_configuration(const Window& window,
                                                 RandomStream& stream) {
    const double eps = window.mass_floor;
    const double intensity = window.box.volume() * LevyIntensity::tail_mass(eps);
    const std::uint64_t count = stream.poisson(intensity);

    std::vector<Atom> atoms;
    atoms.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Atom a;
        for (int k = 0; k < window.box.dim(); ++k) {
            const Interval& ax = window.box.axis(k);
            a.position[k] = stream.uniform(ax.lo, ax.hi);
        }
        a.mass = sample_truncated_mass(eps, stream);
        atoms.push_back(a);
    }
    return WeightedConfiguration(std::move(atoms), window);
}

double local_mass(const WeightedConfiguration& eta, const Box& box) {
    if (!eta.window().box.contains(box))
        throw std::invalid_argument("local_mass: box escapes the sampled window");
    double sum = 0.0;
    for (const auto& a : eta.atoms())
        if (box.contains(a.position)) sum += a.mass;
    return sum;
}

double truncation_bias_bound(const Window& window, double f_sup) {
    if (f_sup < 0.0) throw std::invalid_argument("truncation_bias_bound: f_sup >= 0");
    return f_sup * window.box.volume() * (-std::expm1(-window.mass_floor));
}

void dump_csv(const WeightedConfiguration& eta, std::ostream& out) {
    const int d = eta.window().box.dim();
    for (int i = 0; i < d; ++i) out << 'x' << (i + 1) << ',';
    out << "mass\n";
    char buf[32];
    for (const auto& a : eta.atoms()) {
        for (int i = 0; i < d; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", a.position[i]);
            out << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", a.mass);
        out << buf << '\n';
    }
}

}  // namespace kgamma
