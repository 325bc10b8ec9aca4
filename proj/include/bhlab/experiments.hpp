#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "bhlab/combinatorics.hpp"
#include "bhlab/ksz.hpp"
#include "bhlab/parallel.hpp"
#include "bhlab/rng.hpp"
#include "bhlab/supnorm.hpp"

namespace bhlab {

inline double critical_exponent(int m) {
    if (m < 1) throw std::invalid_argument("critical_exponent requires m >= 1");
    return 2.0 * m / (m + 1.0);
}

struct ExperimentRecord {
    int m = 0;
    int n = 0;
    double q = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
    count_t coeff_count = 0;
    double coeff_lq = 0.0;
    double sup_estimate = 0.0;
    double ratio = 0.0;
    double constant_estimate = 0.0;
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double expected_slope_floor = 0.0;
};

enum class Verdict { diverges, bounded };

inline const char* verdict_name(Verdict v) {
    return v == Verdict::diverges ? "diverges" : "bounded";
}

struct QSlope {
    double q = 0.0;
    SlopeFit fit;
    Verdict verdict = Verdict::bounded;
};

struct BaseSweepEntry {
    KszRecord best;
    count_t coeff_count = 0;
};

inline void validate_sweep_args(int m, const std::vector<int>& n_list) {
    if (m < 2) throw std::invalid_argument("sweep requires m >= 2");
    if (n_list.empty()) throw std::invalid_argument("n_list must not be empty");
    int prev = 0;
    for (int n : n_list) {
        if (n <= m)
            throw std::invalid_argument("every n in n_list must satisfy n > m");
        if (n <= prev) throw std::invalid_argument("n_list must be strictly increasing");
        prev = n;
    }
}

// Domain tag for the per-n sweep streams: keeps them disjoint from the other
// consumers of the master seed (restart streams use small keys 0..restarts-1).
inline constexpr std::uint64_t sweep_stream_tag = 0x7377656570000bULL;

// One best-of-trials polynomial per n; the per-n seed is derived from
// (seed, tag + n) and each trial inside derives again, so any (n, trial) cell
// is a pure function of (seed, n, trial).
inline std::vector<BaseSweepEntry> base_sweep(int m, const std::vector<int>& n_list, int trials,
                                              const SupNormBudgets& budgets = {},
                                              std::uint64_t seed = 0) {
    validate_sweep_args(m, n_list);
    return parallel_map(static_cast<int>(n_list.size()), [&](int i) {
        const int n = n_list[static_cast<std::size_t>(i)];
        auto search = best_sign_search(
            n, m, trials, derive_seed(seed, sweep_stream_tag + static_cast<std::uint64_t>(n)),
            budgets);
        return BaseSweepEntry{search.best, multi_index_count(n, m)};
    });
}

// Sign polynomials have unit-modulus coefficients, so the exact lq norm is
// N^{1/q}; this matches coeff_lq_norm on the regenerated polynomial bitwise.
inline std::vector<ExperimentRecord> records_for_q(const std::vector<BaseSweepEntry>& base,
                                                   double q, int trials) {
    if (!(q > 0.0)) throw std::invalid_argument("records_for_q requires q > 0");
    std::vector<ExperimentRecord> out;
    out.reserve(base.size());
    for (const auto& e : base) {
        ExperimentRecord r;
        r.m = e.best.m;
        r.n = e.best.n;
        r.q = q;
        r.trials = trials;
        r.seed = e.best.seed;
        r.coeff_count = e.coeff_count;
        r.coeff_lq = std::pow(static_cast<double>(e.coeff_count), 1.0 / q);
        r.sup_estimate = e.best.sup_estimate;
        r.ratio = r.coeff_lq / r.sup_estimate;
        r.constant_estimate = e.best.constant_estimate;
        out.push_back(r);
    }
    return out;
}

inline std::vector<ExperimentRecord> ratio_sweep(int m, double q, const std::vector<int>& n_list,
                                                 int trials, const SupNormBudgets& budgets = {},
                                                 std::uint64_t seed = 0) {
    if (!(q > 0.0)) throw std::invalid_argument("ratio_sweep requires q > 0");
    return records_for_q(base_sweep(m, n_list, trials, budgets, seed), q, trials);
}

// OLS of log(ratio) on log(n); exact on affine inputs up to roundoff.
inline SlopeFit fit_growth_exponent(const std::vector<ExperimentRecord>& records) {
    if (records.empty()) throw std::invalid_argument("fit_growth_exponent needs records");
    const int m = records[0].m;
    const double q = records[0].q;
    std::set<int> distinct;
    for (const auto& r : records) {
        if (r.m != m || r.q != q)
            throw std::invalid_argument("fit_growth_exponent records must share (m, q)");
        distinct.insert(r.n);
    }
    if (distinct.size() < 3)
        throw std::invalid_argument("fit_growth_exponent needs at least 3 distinct n");

    const double count = static_cast<double>(records.size());
    double xbar = 0.0, ybar = 0.0;
    for (const auto& r : records) {
        xbar += std::log(static_cast<double>(r.n));
        ybar += std::log(r.ratio);
    }
    xbar /= count;
    ybar /= count;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& r : records) {
        const double dx = std::log(static_cast<double>(r.n)) - xbar;
        const double dy = std::log(r.ratio) - ybar;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    if (syy == 0.0) {
        fit.r_squared = 1.0;
    } else {
        const double residual = syy - fit.slope * sxy;
        fit.r_squared = std::clamp(1.0 - residual / syy, 0.0, 1.0);
    }
    fit.expected_slope_floor = static_cast<double>(m) / q - (m + 1) / 2.0;
    return fit;
}

// OLS slope of log(multi_index_count) against log(n); the s_N of the
// slope-difference identity.
inline double count_growth_slope(int m, const std::vector<int>& n_list) {
    if (n_list.size() < 2) throw std::invalid_argument("count_growth_slope needs >= 2 points");
    const double count = static_cast<double>(n_list.size());
    double xbar = 0.0, ybar = 0.0;
    for (int n : n_list) {
        xbar += std::log(static_cast<double>(n));
        ybar += std::log(static_cast<double>(multi_index_count(n, m)));
    }
    xbar /= count;
    ybar /= count;
    double sxx = 0.0, sxy = 0.0;
    for (int n : n_list) {
        const double dx = std::log(static_cast<double>(n)) - xbar;
        const double dy = std::log(static_cast<double>(multi_index_count(n, m))) - ybar;
        sxx += dx * dx;
        sxy += dx * dy;
    }
    return sxy / sxx;
}

struct DivergenceReport {
    int m = 0;
    std::vector<int> n_list;
    int trials = 0;
    std::uint64_t seed = 0;
    double divergence_threshold = 0.2;
    double constant_envelope = 0.0;
    std::vector<BaseSweepEntry> base;
    std::vector<ExperimentRecord> records;  // grouped by q in q_list order, n ascending inside
    std::vector<QSlope> slopes;
};

// The records shared across all q come from one base sweep, which is what
// makes the slope-difference identity exact: the sup estimates cancel.
inline DivergenceReport divergence_report(int m, const std::vector<double>& q_list,
                                          const std::vector<int>& n_list, int trials,
                                          const SupNormBudgets& budgets = {},
                                          std::uint64_t seed = 0,
                                          double divergence_threshold = 0.2) {
    if (q_list.empty()) throw std::invalid_argument("q_list must not be empty");
    double prev = 0.0;
    for (double q : q_list) {
        if (!(q > 0.0)) throw std::invalid_argument("every q must be positive");
        if (q < prev) throw std::invalid_argument("q_list must be sorted ascending");
        prev = q;
    }

    DivergenceReport report;
    report.m = m;
    report.n_list = n_list;
    report.trials = trials;
    report.seed = seed;
    report.divergence_threshold = divergence_threshold;
    report.base = base_sweep(m, n_list, trials, budgets, seed);
    for (const auto& e : report.base)
        report.constant_envelope = std::max(report.constant_envelope, e.best.constant_estimate);
    for (double q : q_list) {
        auto records = records_for_q(report.base, q, trials);
        QSlope row;
        row.q = q;
        row.fit = fit_growth_exponent(records);
        row.verdict = row.fit.slope > divergence_threshold ? Verdict::diverges : Verdict::bounded;
        report.slopes.push_back(row);
        report.records.insert(report.records.end(), records.begin(), records.end());
    }
    return report;
}

// The cautious series: the sup estimate is replaced by the KSZ envelope
// constant_envelope * n^{(m+1)/2} sqrt(log m), making the ratio a conservative
// lower estimate instead of an upper one.
struct ConservativeRecord {
    int m = 0;
    int n = 0;
    double q = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
    count_t coeff_count = 0;
    double coeff_lq = 0.0;
    double ksz_envelope = 0.0;
    double conservative_ratio = 0.0;
    double constant_envelope = 0.0;
};

inline std::vector<ConservativeRecord> conservative_records(const DivergenceReport& report) {
    std::vector<ConservativeRecord> out;
    out.reserve(report.records.size());
    for (const auto& r : report.records) {
        ConservativeRecord c;
        c.m = r.m;
        c.n = r.n;
        c.q = r.q;
        c.trials = r.trials;
        c.seed = r.seed;
        c.coeff_count = r.coeff_count;
        c.coeff_lq = r.coeff_lq;
        c.ksz_envelope = report.constant_envelope * ksz_denominator(r.n, r.m);
        c.conservative_ratio = c.coeff_lq / c.ksz_envelope;
        c.constant_envelope = report.constant_envelope;
        out.push_back(c);
    }
    return out;
}

}  // namespace bhlab
