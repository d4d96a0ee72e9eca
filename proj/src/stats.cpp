#include "kgamma/stats.hpp"

#include "kgamma/special.hpp"

namespace kgamma {

namespace {
// Guards sigma_distance when both the SE and the tolerance vanish (exact
// identities): any nonzero discrepancy then reads as +inf.
double sigma_of(double discrepancy, double denom) {
    if (denom > 0.0) return discrepancy / denom;
    return discrepancy == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}
}  // namespace

IdentityVerdict make_verdict_sigma(std::string identity, std::string detail,
                                   double lhs, double lhs_se, double rhs,
                                   double rhs_se, double coupled_se,
                                   double tolerance, std::uint64_t n,
                                   std::uint64_t seed) {
    IdentityVerdict v;
    v.identity = std::move(identity);
    v.detail = std::move(detail);
    v.criterion = "4sigma";
    v.lhs = lhs;
    v.rhs = rhs;
    v.lhs_se = lhs_se;
    v.rhs_se = rhs_se;
    v.combined_se = coupled_se;
    v.tolerance = tolerance;
    v.discrepancy = std::fabs(lhs - rhs);
    v.sigma_distance = sigma_of(v.discrepancy, coupled_se + tolerance);
    v.pass = v.discrepancy <= 4.0 * (coupled_se + tolerance);
    v.n = n;
    v.seed = seed;
    return v;
}

IdentityVerdict make_verdict_pvalue(std::string identity, std::string detail,
                                    double statistic, double p_value,
                                    std::uint64_t n, std::uint64_t seed,
                                    double threshold) {
    IdentityVerdict v;
    v.identity = std::move(identity);
    v.detail = std::move(detail);
    v.criterion = "p>0.01";
    v.lhs = statistic;
    v.rhs = 0.0;
    v.discrepancy = statistic;
    v.p_value = p_value;
    v.sigma_distance = 0.0;
    v.pass = p_value > threshold;
    v.n = n;
    v.seed = seed;
    return v;
}

IdentityVerdict make_verdict_abs(std::string identity, std::string detail,
                                 double lhs, double rhs, double tolerance) {
    IdentityVerdict v;
    v.identity = std::move(identity);
    v.detail = std::move(detail);
    v.criterion = "abs";
    v.lhs = lhs;
    v.rhs = rhs;
    v.tolerance = tolerance;
    v.discrepancy = std::fabs(lhs - rhs);
    v.sigma_distance = sigma_of(v.discrepancy, tolerance);
    v.pass = v.discrepancy <= tolerance;
    return v;
}

double ks_pvalue(double d, std::size_t n) {
    const double sn = std::sqrt(double(n));
    return kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
}

KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t n = a.size(), m = b.size();
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        const double x = std::min(a[i], b[j]);
        while (i < n && a[i] <= x) ++i;
        while (j < m && b[j] <= x) ++j;
        d = std::max(d, std::fabs(double(i) / n - double(j) / m));
    }
    const double ne = double(n) * double(m) / double(n + m);
    const double sn = std::sqrt(ne);
    return {d, kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d)};
}

Chi2Result poisson_gof(const std::vector<std::uint64_t>& counts, double mean) {
    if (counts.empty()) throw std::invalid_argument("poisson_gof: no samples");
    std::uint64_t kmax = 0;
    for (auto c : counts) kmax = std::max(kmax, c);

    // Observed histogram over 0..kmax, then merge cells from both tails
    // until every expected count is >= 5.
    std::vector<double> observed(kmax + 1, 0.0), expected(kmax + 1, 0.0);
    for (auto c : counts) observed[c] += 1.0;
    const double n = double(counts.size());
    double pmf = std::exp(-mean);  // P(K = 0)
    double tail = 1.0;
    for (std::uint64_t k = 0; k <= kmax; ++k) {
        expected[k] = (k < kmax) ? n * pmf : n * tail;
        tail -= pmf;
        pmf *= mean / double(k + 1);
    }

    std::vector<double> obs_bins, exp_bins;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t k = 0; k <= kmax; ++k) {
        o_acc += observed[k];
        e_acc += expected[k];
        if (e_acc >= 5.0) {
            obs_bins.push_back(o_acc);
            exp_bins.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    if (e_acc > 0.0) {
        if (obs_bins.empty()) {
            obs_bins.push_back(o_acc);
            exp_bins.push_back(e_acc);
        } else {
            obs_bins.back() += o_acc;
            exp_bins.back() += e_acc;
        }
    }

    Chi2Result r;
    for (std::size_t i = 0; i < obs_bins.size(); ++i) {
        const double d = obs_bins[i] - exp_bins[i];
        r.statistic += d * d / exp_bins[i];
    }
    r.dof = int(obs_bins.size()) - 1;
    r.p_value = r.dof >= 1
                    ? regularized_gamma_q(0.5 * r.dof, 0.5 * r.statistic)
                    : 1.0;
    return r;
}

}  // namespace kgamma
