#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "kgamma/measure.hpp"
#include "kgamma/special.hpp"
#include "kgamma/stats.hpp"
#include "oracles.hpp"

using namespace kgamma;

namespace {
double oracle_e1(double x) {
    return oracles::adaptive_simpson([](double s) { return std::exp(-s) / s; }, x,
                                     x + 50.0, 1e-15);
}
}  // namespace

TEST_CASE("truncated mass sampler: support, mean, distribution") {
    RandomStream rs(101);
    const double eps = 0.5;
    const int n = 100000;
    RunningStat stat;
    double min_draw = 1e300;
    for (int i = 0; i < n; ++i) {
        const double s = sample_truncated_mass(eps, rs);
        min_draw = std::min(min_draw, s);
        stat.add(s);
    }
    CHECK(min_draw >= eps);  // every draw above the floor

    // E[S] = int_eps^inf e^{-s} ds / E1(eps), both via the quadrature oracle.
    const double mean_oracle =
        oracles::adaptive_simpson([](double s) { return std::exp(-s); }, eps, 60.0,
                                  1e-14) /
        oracle_e1(eps);
    CHECK(std::fabs(stat.mean() - mean_oracle) < 4.0 * stat.std_error());

    CHECK_THROWS_AS(sample_truncated_mass(0.0, rs), std::domain_error);
}

TEST_CASE("truncated mass sampler: KS at eps = 1") {
    RandomStream rs(102);
    const double eps = 1.0;
    std::vector<double> samples;
    for (int i = 0; i < 10000; ++i) samples.push_back(sample_truncated_mass(eps, rs));
    const double tail = oracle_e1(eps);
    const auto ks = ks_test(std::move(samples), [&](double t) {
        return t <= eps ? 0.0 : 1.0 - oracle_e1(t) / tail;
    });
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("truncated mass sampler: KS at small eps") {
    RandomStream rs(103);
    const double eps = 1e-3;
    std::vector<double> samples;
    for (int i = 0; i < 10000; ++i) samples.push_back(sample_truncated_mass(eps, rs));
    const double tail = exp_integral_e1(eps);
    const auto ks = ks_test(std::move(samples), [&](double t) {
        return t <= eps ? 0.0 : 1.0 - exp_integral_e1(t) / tail;
    });
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("gamma configuration: count law and pinpointing") {
    const Window window(Box::unit(2), 0.1);
    RandomStream rs(104);
    const double intensity = window.box.volume() * exp_integral_e1(0.1);

    RunningStat count_stat;
    std::vector<std::uint64_t> counts;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const auto eta = sample_gamma_configuration(window, rs);
        counts.push_back(eta.size());
        count_stat.add(double(eta.size()));
        CHECK(eta.pinpointing());
        for (const auto& a : eta.atoms()) {
            CHECK(a.mass >= window.mass_floor);
            CHECK(window.box.contains(a.position));
        }
    }
    // Mean count = vol * E1(eps) within 4 SE (E1 via the oracle).
    const double expected = window.box.volume() * oracle_e1(0.1);
    CHECK(std::fabs(count_stat.mean() - expected) < 4.0 * count_stat.std_error());
    // Chi-square goodness of fit of the count distribution.
    CHECK(poisson_gof(counts, intensity).p_value > 0.01);
}

TEST_CASE("degenerate window produces empty configurations") {
    const Window window(Box(1, {Interval{0.3, 0.3}}), 0.1);
    RandomStream rs(105);
    for (int i = 0; i < 50; ++i)
        CHECK(sample_gamma_configuration(window, rs).empty());
}

TEST_CASE("reproducibility of configurations is bitwise") {
    const Window window(Box::unit(3), 1e-4);
    RandomStream a = RandomStream(77).split(2);
    RandomStream b = RandomStream(77).split(2);
    for (int rep = 0; rep < 20; ++rep) {
        const auto ea = sample_gamma_configuration(window, a);
        const auto eb = sample_gamma_configuration(window, b);
        REQUIRE(ea.size() == eb.size());
        for (std::size_t i = 0; i < ea.size(); ++i) {
            CHECK(ea.atoms()[i].position == eb.atoms()[i].position);
            CHECK(ea.atoms()[i].mass == eb.atoms()[i].mass);
        }
    }
}

TEST_CASE("local mass") {
    const Window window(Box::unit(1), 0.01);
    WeightedConfiguration empty({}, window);
    CHECK(local_mass(empty, window.box) == 0.0);

    Atom a;
    a.position = {0.5, 0.0, 0.0};
    a.mass = 2.0;
    WeightedConfiguration one({a}, window);
    CHECK(local_mass(one, window.box) == 2.0);
    CHECK(local_mass(one, Box(1, {Interval{0.6, 1.0}})) == 0.0);

    CHECK_THROWS_AS(local_mass(one, Box(1, {Interval{0.0, 1.5}})),
                    std::invalid_argument);
}

TEST_CASE("local mass Monte Carlo mean = 1 - truncation bias") {
    const Window window(Box::unit(1), 1e-6);
    RandomStream rs(106);
    RunningStat stat;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
        stat.add(local_mass(sample_gamma_configuration(window, rs), window.box));
    // Mecke: E eta(A) = vol * int_eps^inf e^{-s} ds = e^{-eps}.
    CHECK(std::fabs(stat.mean() - std::exp(-1e-6)) < 4.0 * stat.std_error());
}

TEST_CASE("truncation bias bound") {
    const Window w1(Box::unit(1), 1e-6);
    CHECK(truncation_bias_bound(w1, 1.0) <= 1e-6);
    CHECK(truncation_bias_bound(w1, 0.0) == 0.0);

    // Bound matches vol * int_0^eps e^{-s} ds within factor (1 + eps).
    const Window w2(Box::unit(2), 0.05);
    const double direct = w2.box.volume() * oracles::adaptive_simpson(
                                                [](double s) { return std::exp(-s); },
                                                0.0, 0.05, 1e-14);
    const double bound = truncation_bias_bound(w2, 1.0);
    CHECK(bound == doctest::Approx(direct).epsilon(0.05 + 1e-9));
}

TEST_CASE("hat-class exactness: estimates invariant under shrinking eps") {
    // <<phi, eta>> for phi supported in masses [0.2, 1.8]: lowering the floor
    // below 0.2 cannot change the law.
    auto pairing_mean = [&](double eps, std::uint64_t seed) {
        const Window window(Box::unit(1), eps);
        RandomStream rs(seed);
        RunningStat stat;
        for (int i = 0; i < 60000; ++i) {
            const auto eta = sample_gamma_configuration(window, rs);
            double p = 0.0;
            for (const auto& a : eta.atoms()) {
                // bump profile in s on [0.2, 1.8], spatial factor 1 on [0,1]
                const double t = (a.mass - 1.0) / 0.8;
                if (t * t < 1.0) p += std::exp(-1.0 / (1.0 - t * t));
            }
            stat.add(p);
        }
        return stat;
    };
    const auto coarse = pairing_mean(0.05, 201);
    const auto fine = pairing_mean(1e-6, 202);
    const double se = std::sqrt(coarse.std_error() * coarse.std_error() +
                                fine.std_error() * fine.std_error());
    CHECK(std::fabs(coarse.mean() - fine.mean()) < 4.0 * se);
}

TEST_CASE("gamma marginal KS") {
    const Window window(Box::unit(1), 1e-6);
    RandomStream rs(107);
    std::vector<double> samples;
    for (int i = 0; i < 10000; ++i)
        samples.push_back(local_mass(sample_gamma_configuration(window, rs), window.box));
    const auto ks =
        ks_test(std::move(samples), [](double x) { return gamma_cdf(1.0, x); });
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("csv dump format") {
    const Window window(Box::unit(2), 0.01);
    Atom a;
    a.position = {0.25, 0.75, 0.0};
    a.mass = 1.5;
    WeightedConfiguration eta({a}, window);
    std::ostringstream os;
    dump_csv(eta, os);
    CHECK(os.str() == "x1,x2,mass\n0.25,0.75,1.5\n");
}
