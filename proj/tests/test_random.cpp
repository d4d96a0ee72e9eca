#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "kgamma/random.hpp"
#include "kgamma/stats.hpp"

using namespace kgamma;

TEST_CASE("identical (seed, path) reproduces identical draws") {
    RandomStream a(42);
    RandomStream b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

    RandomStream c = RandomStream(42).split(3).split(7);
    RandomStream d = RandomStream(42).split(3).split(7);
    for (int i = 0; i < 1000; ++i) CHECK(c.uniform() == d.uniform());
    CHECK(c.path() == std::vector<std::uint32_t>{3, 7});
    CHECK(c.seed() == 42);
}

TEST_CASE("distinct paths decorrelate") {
    RandomStream root(7);
    RandomStream a = root.split(0);
    RandomStream b = root.split(1);
    int collisions = 0;
    for (int i = 0; i < 1000; ++i)
        if (a.next_u64() == b.next_u64()) ++collisions;
    CHECK(collisions == 0);

    // Splitting does not perturb the parent.
    RandomStream p(9), q(9);
    (void)p.split(5);
    CHECK(p.next_u64() == q.next_u64());
}

TEST_CASE("uniform moments") {
    RandomStream rs(11);
    RunningStat stat;
    const int n = 200000;
    for (int i = 0; i < n; ++i) stat.add(rs.uniform());
    CHECK(std::fabs(stat.mean() - 0.5) < 5.0 * stat.std_error());
    CHECK(stat.variance() == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("normal moments") {
    RandomStream rs(12);
    RunningStat stat, stat2;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = rs.normal();
        stat.add(x);
        stat2.add(x * x);
    }
    CHECK(std::fabs(stat.mean()) < 5.0 * stat.std_error());
    CHECK(std::fabs(stat2.mean() - 1.0) < 5.0 * stat2.std_error());
}

TEST_CASE("gamma sampler moments (Marsaglia-Tsang)") {
    RandomStream rs(13);
    for (double shape : {0.7, 1.0, 2.5, 6.0}) {
        RunningStat stat;
        const int n = 100000;
        for (int i = 0; i < n; ++i) stat.add(rs.gamma(shape));
        CHECK(std::fabs(stat.mean() - shape) < 5.0 * stat.std_error());
        CHECK(stat.variance() == doctest::Approx(shape).epsilon(0.05));
    }
    CHECK_THROWS_AS(rs.gamma(0.0), std::domain_error);
}

TEST_CASE("poisson sampler across both regimes") {
    RandomStream rs(14);
    for (double mean : {0.3, 3.0, 11.0, 40.0, 300.0}) {
        RunningStat stat;
        const int n = 100000;
        for (int i = 0; i < n; ++i) stat.add(double(rs.poisson(mean)));
        CHECK(std::fabs(stat.mean() - mean) < 5.0 * stat.std_error());
        CHECK(stat.variance() == doctest::Approx(mean).epsilon(0.05));
    }
    CHECK(rs.poisson(0.0) == 0);
}

TEST_CASE("poisson goodness of fit") {
    RandomStream rs(15);
    std::vector<std::uint64_t> counts;
    counts.reserve(10000);
    for (int i = 0; i < 10000; ++i) counts.push_back(rs.poisson(13.2));
    const auto gof = poisson_gof(counts, 13.2);
    CHECK(gof.p_value > 0.01);
}
