#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <string>
#include <vector>

#include "kgamma/random.hpp"

namespace kgamma {

// Welford accumulator; shard results merge deterministically in fixed order.
class RunningStat {
  public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / double(n_);
        m2_ += d * (x - mean_);
    }

    void merge(const RunningStat& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) {
            *this = o;
            return;
        }
        const double d = o.mean_ - mean_;
        const std::uint64_t n = n_ + o.n_;
        m2_ += o.m2_ + d * d * double(n_) * double(o.n_) / double(n);
        mean_ += d * double(o.n_) / double(n);
        n_ = n;
    }

    std::uint64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / double(n_ - 1) : 0.0; }
    double std_error() const {
        return n_ > 0 ? std::sqrt(variance() / double(n_)) : 0.0;
    }

  private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct EstimateReport {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t n_samples = 0;
    int shards = 1;
    std::uint64_t seed = 0;
};

// Outcome of one identity check. `sigma_distance` is the discrepancy in
// units of (combined SE + deterministic tolerance); statistical verdicts
// pass at 4 sigma, distributional ones at p > 0.01, exact ones at the
// stated absolute tolerance (criterion records which).
struct IdentityVerdict {
    std::string identity;
    std::string kind;         // form kind when applicable
    std::string coefficient;  // mass-coefficient label when applicable
    std::string detail;
    std::string criterion;  // "4sigma" | "p>0.01" | "abs"
    double lhs = 0.0;
    double rhs = 0.0;
    double lhs_se = 0.0;
    double rhs_se = 0.0;
    double combined_se = 0.0;
    double tolerance = 0.0;
    double discrepancy = 0.0;
    double sigma_distance = 0.0;
    double p_value = std::nan("");
    bool pass = false;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    double runtime_ms = 0.0;
};

IdentityVerdict make_verdict_sigma(std::string identity, std::string detail,
                                   double lhs, double lhs_se, double rhs,
                                   double rhs_se, double coupled_se,
                                   double tolerance, std::uint64_t n,
                                   std::uint64_t seed);

IdentityVerdict make_verdict_pvalue(std::string identity, std::string detail,
                                    double statistic, double p_value,
                                    std::uint64_t n, std::uint64_t seed,
                                    double threshold = 0.01);

IdentityVerdict make_verdict_abs(std::string identity, std::string detail,
                                 double lhs, double rhs, double tolerance);

// --- sharded Monte Carlo drivers -------------------------------------------
// Shard k draws from stream.split(k); partial accumulators merge in shard
// order, so results are a pure function of (seed, path, shards, n).

struct McConfig {
    std::uint64_t n = 100000;
    int shards = 1;
};

template <class PerSample>
RunningStat mc_accumulate(const McConfig& cfg, const RandomStream& stream,
                          PerSample&& per_sample) {
    const int shards = std::max(1, cfg.shards);
    std::vector<std::future<RunningStat>> futs;
    futs.reserve(shards);
    for (int k = 0; k < shards; ++k) {
        const std::uint64_t nk = cfg.n / shards + (std::uint64_t(k) < cfg.n % shards);
        RandomStream sub = stream.split(std::uint32_t(k));
        futs.push_back(std::async(std::launch::async, [nk, sub, &per_sample]() mutable {
            RunningStat acc;
            for (std::uint64_t i = 0; i < nk; ++i) acc.add(per_sample(sub));
            return acc;
        }));
    }
    RunningStat total;
    for (auto& f : futs) total.merge(f.get());
    return total;
}

struct PairedStats {
    RunningStat lhs;
    RunningStat rhs;
    RunningStat diff;  // same-stream coupling: SE of lhs - rhs per sample
};

template <class PerSample>
PairedStats mc_accumulate_paired(const McConfig& cfg, const RandomStream& stream,
                                 PerSample&& per_sample) {
    const int shards = std::max(1, cfg.shards);
    std::vector<std::future<PairedStats>> futs;
    futs.reserve(shards);
    for (int k = 0; k < shards; ++k) {
        const std::uint64_t nk = cfg.n / shards + (std::uint64_t(k) < cfg.n % shards);
        RandomStream sub = stream.split(std::uint32_t(k));
        futs.push_back(std::async(std::launch::async, [nk, sub, &per_sample]() mutable {
            PairedStats acc;
            for (std::uint64_t i = 0; i < nk; ++i) {
                const auto [a, b] = per_sample(sub);
                acc.lhs.add(a);
                acc.rhs.add(b);
                acc.diff.add(a - b);
            }
            return acc;
        }));
    }
    PairedStats total;
    for (auto& f : futs) {
        PairedStats part = f.get();
        total.lhs.merge(part.lhs);
        total.rhs.merge(part.rhs);
        total.diff.merge(part.diff);
    }
    return total;
}

// --- goodness of fit ---------------------------------------------------------

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
};

double ks_pvalue(double d, std::size_t n);

// One-sample KS against a continuous CDF; asymptotic p-value with the
// Stephens small-sample correction.
template <class Cdf>
KsResult ks_test(std::vector<double> samples, Cdf&& cdf) {
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::fabs(f - double(i) / double(n)));
        d = std::max(d, std::fabs(double(i + 1) / double(n) - f));
    }
    return {d, ks_pvalue(d, n)};
}

// Two-sample KS (asymptotic p-value); ties are handled by comparing the two
// empirical CDFs over the pooled sample.
KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b);

struct Chi2Result {
    double statistic = 0.0;
    double p_value = 0.0;
    int dof = 0;
};

// Chi-square goodness of fit of integer counts against Poisson(mean); tail
// cells merged until each expected count is >= 5.
Chi2Result poisson_gof(const std::vector<std::uint64_t>& counts, double mean);

}  // namespace kgamma
