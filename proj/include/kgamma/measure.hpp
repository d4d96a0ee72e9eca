#pragma once

#include <iosfwd>
#include <vector>

#include "kgamma/geometry.hpp"
#include "kgamma/random.hpp"

namespace kgamma {

// One weighted point (x, s) of a discrete Radon measure: position in R^d and
// a strictly positive mass.
struct Atom {
    Point position{};
    double mass = 0.0;
};

// Finite restriction of a discrete Radon measure to a sampling window.
// Invariants: every mass >= window.mass_floor and all positions are pairwise
// distinct (pinpointing; the continuous position law never produces ties).
class WeightedConfiguration {
  public:
    WeightedConfiguration() = default;
    WeightedConfiguration(std::vector<Atom> atoms, Window window)
        : atoms_(std::move(atoms)), window_(std::move(window)) {}

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::vector<Atom>& atoms() { return atoms_; }
    const Window& window() const { return window_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

    bool pinpointing() const;

  private:
    std::vector<Atom> atoms_;
    Window window_;
};

// The fixed Levy law d(lambda)(s) = s^{-1} e^{-s} ds and its window-level
// derived quantities.
struct LevyIntensity {
    // lambda([eps, inf)) = E1(eps).
    static double tail_mass(double eps);
    // \int_eps^inf s d(lambda)(s) = e^{-eps}.
    static double mean_mass_above(double eps) { return std::exp(-eps); }
};

// Draw from the normalized density s^{-1} e^{-s} / E1(eps) on [eps, inf).
// Two-piece composition: log-uniform proposal thinned by e^{-s} on [eps, 1],
// shifted unit exponential thinned by 1/s on [1, inf); the branch is chosen
// once per draw with its exact weight, and proposals repeat within the branch.
double sample_truncated_mass(double eps, RandomStream& stream);

// Exact sample of the gamma random measure restricted to the window via the
// marked-Poisson representation: count ~ Poisson(vol * E1(eps)), positions
// i.i.d. uniform on the box, masses i.i.d. truncated Levy.
WeightedConfiguration sample_gamma_configuration(const Window& window,
                                                 RandomStream& stream);

// Sum of masses of atoms lying in `box`. The box must be contained in the
// configuration's window (outside it the measure was never sampled).
double local_mass(const WeightedConfiguration& eta, const Box& box);

// Upper bound f_sup * vol * (1 - e^{-eps}) <= f_sup * vol * eps for the
// absolute bias of E<f, eta> caused by the mass-floor truncation.
double truncation_bias_bound(const Window& window, double f_sup);

// CSV dump, header "x1,...,xd,mass", one atom per row, 17 significant digits.
void dump_csv(const WeightedConfiguration& eta, std::ostream& out);

}  // namespace kgamma
