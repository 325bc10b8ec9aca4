#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bhlab/parallel.hpp"
#include "bhlab/polynomial.hpp"
#include "bhlab/rng.hpp"
#include "bhlab/supnorm.hpp"

namespace bhlab {

// One Kahane-Salem-Zygmund data point: a sign polynomial, its estimated sup
// norm, and the implied constant against the n^{(m+1)/2} sqrt(log m) envelope.
struct KszRecord {
    int n = 0;
    int m = 0;
    std::uint64_t seed = 0;
    double sup_estimate = 0.0;
    double ksz_bound_denominator = 0.0;
    double constant_estimate = 0.0;
};

// log is natural; any other base only rescales the empirical constant.
inline double ksz_denominator(int n, int m) {
    if (n < 1) throw std::invalid_argument("ksz_denominator requires n >= 1");
    if (m < 2) throw std::invalid_argument("ksz_denominator requires m >= 2");
    return std::pow(static_cast<double>(n), (m + 1) / 2.0) *
           std::sqrt(std::log(static_cast<double>(m)));
}

inline KszRecord ksz_record(int n, int m, std::uint64_t seed, const SupNormBudgets& budgets = {}) {
    const double denominator = ksz_denominator(n, m);  // validates n, m
    auto p = random_sign_polynomial(n, m, seed);
    auto est = sup_norm_estimate(p, budgets, seed);
    KszRecord r;
    r.n = n;
    r.m = m;
    r.seed = seed;
    r.sup_estimate = est.lower_bound;
    r.ksz_bound_denominator = denominator;
    r.constant_estimate = r.sup_estimate / r.ksz_bound_denominator;
    return r;
}

struct BestSignResult {
    KszRecord best;
    std::vector<double> constant_estimates;
    std::vector<KszRecord> records;
};

// Trial t uses derive_seed(seed, t), so enlarging the trial budget keeps the
// earlier trials and the minimum sup is non-increasing in trials. Ties keep
// the smallest trial index.
inline BestSignResult best_sign_search(int n, int m, int trials, std::uint64_t seed,
                                       const SupNormBudgets& budgets = {}) {
    if (trials < 1) throw std::invalid_argument("best_sign_search requires trials >= 1");
    BestSignResult out;
    out.records = parallel_map(trials, [&](int t) {
        return ksz_record(n, m, derive_seed(seed, static_cast<std::uint64_t>(t)), budgets);
    });
    out.constant_estimates.reserve(out.records.size());
    std::size_t best = 0;
    for (std::size_t t = 0; t < out.records.size(); ++t) {
        out.constant_estimates.push_back(out.records[t].constant_estimate);
        if (out.records[t].sup_estimate < out.records[best].sup_estimate) best = t;
    }
    out.best = out.records[best];
    return out;
}

}  // namespace bhlab
