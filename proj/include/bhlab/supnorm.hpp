#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bhlab/parallel.hpp"
#include "bhlab/polynomial.hpp"
#include "bhlab/rng.hpp"

namespace bhlab {

enum class EstimateMethod { sample, ascent, grid };

inline const char* method_name(EstimateMethod m) {
    switch (m) {
        case EstimateMethod::sample: return "sample";
        case EstimateMethod::ascent: return "ascent";
        case EstimateMethod::grid: return "grid";
    }
    throw std::invalid_argument("unknown estimate method");
}

struct SupNormBudgets {
    int restarts = 32;
    int samples_per_restart = 256;
    double tol = 1e-9;
    int max_sweeps = 200;
};

// lower_bound is always the direct evaluation of |P| at witness, so the
// witness-consistency invariant holds by construction.
struct SupNormEstimate {
    double lower_bound = 0.0;
    TorusPoint witness;
    std::optional<double> upper_bound;
    int restarts_used = 0;
    long long evaluations_used = 0;
    EstimateMethod method = EstimateMethod::sample;
};

namespace detail {

// |sum_e B[e] w^e| at w = exp(it), by Horner.
inline double line_modulus(const std::vector<Complex>& coeffs, double t) {
    const Complex w(std::cos(t), std::sin(t));
    Complex acc(0.0, 0.0);
    for (std::size_t e = coeffs.size(); e-- > 0;) acc = acc * w + coeffs[e];
    return std::abs(acc);
}

template <typename F>
std::pair<double, double> golden_section_max(F&& f, double a, double b, long long& evals) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    evals += 2;
    for (int i = 0; i < 64 && (b - a) > 1e-12; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
        ++evals;
    }
    return f1 > f2 ? std::pair<double, double>{x1, f1} : std::pair<double, double>{x2, f2};
}

// Flat n-column exponent table in rank order; shared by the hot loops below.
inline std::vector<int> exponent_table(int n, int m) {
    std::vector<int> table;
    table.reserve(static_cast<std::size_t>(multi_index_count(n, m)) * n);
    MultiIndex alpha = first_multi_index(n, m);
    do {
        for (int j = 0; j < n; ++j) table.push_back(alpha[static_cast<std::size_t>(j)]);
    } while (next_multi_index(alpha));
    return table;
}

}  // namespace detail

inline SupNormEstimate sample_estimate(const HomogeneousPolynomial& p, int samples,
                                       std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("sample_estimate requires samples >= 1");
    const int n = p.variables();
    auto eng = make_engine(seed);
    double best = -1.0;
    std::vector<double> best_phases(static_cast<std::size_t>(n), 0.0);
    std::vector<double> phases(static_cast<std::size_t>(n));
    for (int s = 0; s < samples; ++s) {
        for (double& t : phases) t = two_pi * uniform_unit(eng);
        const double v = std::abs(evaluate_on_torus(p, TorusPoint(phases)));
        if (v > best) {
            best = v;
            best_phases = phases;
        }
    }
    SupNormEstimate est;
    est.witness = TorusPoint(best_phases);
    est.lower_bound = std::abs(evaluate_on_torus(p, est.witness));
    est.restarts_used = 0;
    est.evaluations_used = samples;
    est.method = EstimateMethod::sample;
    return est;
}

// Cyclic coordinate ascent. Along coordinate j the polynomial collapses to a
// univariate trigonometric polynomial sum_e B_e e^{i e theta}; each coordinate
// step keeps the incumbent phase as a candidate, so the objective never drops.
inline SupNormEstimate phase_ascent(const HomogeneousPolynomial& p, const TorusPoint& start,
                                    double tol, int max_sweeps) {
    if (!(tol > 0.0)) throw std::invalid_argument("phase_ascent requires tol > 0");
    if (max_sweeps < 1) throw std::invalid_argument("phase_ascent requires max_sweeps >= 1");
    const int n = p.variables();
    const int m = p.degree();
    if (start.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("start point has wrong dimension");

    std::vector<double> theta = start.phases();
    std::vector<Complex> z = start.coordinates();
    long long evals = 1;
    double current = std::abs(evaluate(p, z));

    const std::vector<int> expo = detail::exponent_table(n, m);
    const std::size_t count = p.coefficients().size();
    std::vector<Complex> pows(static_cast<std::size_t>(n) * (m + 1));
    std::vector<Complex> line(static_cast<std::size_t>(m) + 1);
    const int scan_points = std::max(8, 4 * m + 4);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        const double sweep_base = current;
        for (int j = 0; j < n; ++j) {
            for (int l = 0; l < n; ++l) {
                pows[static_cast<std::size_t>(l) * (m + 1)] = Complex(1.0, 0.0);
                for (int e = 1; e <= m; ++e)
                    pows[static_cast<std::size_t>(l) * (m + 1) + e] =
                        pows[static_cast<std::size_t>(l) * (m + 1) + e - 1] * z[static_cast<std::size_t>(l)];
            }
            std::fill(line.begin(), line.end(), Complex(0.0, 0.0));
            for (std::size_t i = 0; i < count; ++i) {
                Complex term = p.coefficients()[i];
                int ej = 0;
                for (int l = 0; l < n; ++l) {
                    const int e = expo[i * n + static_cast<std::size_t>(l)];
                    if (l == j)
                        ej = e;
                    else if (e != 0)
                        term *= pows[static_cast<std::size_t>(l) * (m + 1) + e];
                }
                line[static_cast<std::size_t>(ej)] += term;
            }
            auto f = [&](double t) { return detail::line_modulus(line, t); };

            double best_t = theta[static_cast<std::size_t>(j)];
            double best_v = f(best_t);
            ++evals;
            for (int s = 0; s < scan_points; ++s) {
                const double t = two_pi * s / scan_points;
                const double v = f(t);
                ++evals;
                if (v > best_v) {
                    best_v = v;
                    best_t = t;
                }
            }
            const double half = two_pi / scan_points;
            const auto [refined_t, refined_v] =
                detail::golden_section_max(f, best_t - half, best_t + half, evals);
            if (refined_v > best_v) {
                best_v = refined_v;
                best_t = refined_t;
            }
            if (best_v > current) {
                const double nt = normalize_phase(best_t);
                theta[static_cast<std::size_t>(j)] = nt;
                z[static_cast<std::size_t>(j)] = Complex(std::cos(nt), std::sin(nt));
                current = best_v;
            }
        }
        if (current - sweep_base < tol) break;
    }

    SupNormEstimate est;
    est.witness = TorusPoint(theta);
    est.lower_bound = std::abs(evaluate_on_torus(p, est.witness));
    ++evals;
    est.restarts_used = 0;
    est.evaluations_used = evals;
    est.method = EstimateMethod::ascent;
    return est;
}

// Best of independent restarts; restart r is seeded by derive_seed(seed, r),
// so the outcome is a pure function of (P, budgets, seed) and non-decreasing
// in the restart budget. Ties keep the smallest restart index.
inline SupNormEstimate sup_norm_estimate(const HomogeneousPolynomial& p,
                                         const SupNormBudgets& budgets = {},
                                         std::uint64_t seed = 0) {
    if (budgets.restarts < 1) throw std::invalid_argument("sup_norm_estimate requires restarts >= 1");
    if (budgets.samples_per_restart < 1)
        throw std::invalid_argument("sup_norm_estimate requires samples_per_restart >= 1");

    auto results = parallel_map(budgets.restarts, [&](int r) {
        const std::uint64_t child = derive_seed(seed, static_cast<std::uint64_t>(r));
        SupNormEstimate sampled = sample_estimate(p, budgets.samples_per_restart, child);
        SupNormEstimate refined = phase_ascent(p, sampled.witness, budgets.tol, budgets.max_sweeps);
        refined.evaluations_used += sampled.evaluations_used;
        return refined;
    });

    long long evals = 0;
    for (const auto& r : results) evals += r.evaluations_used;
    std::size_t best = 0;
    for (std::size_t r = 1; r < results.size(); ++r)
        if (results[r].lower_bound > results[best].lower_bound) best = r;

    SupNormEstimate est = results[best];
    est.restarts_used = budgets.restarts;
    est.evaluations_used = evals;
    est.method = EstimateMethod::ascent;
    return est;
}

inline SupNormEstimate sup_norm_estimate(const HomogeneousPolynomial& p, int restarts,
                                         int samples_per_restart, double tol, std::uint64_t seed) {
    SupNormBudgets budgets;
    budgets.restarts = restarts;
    budgets.samples_per_restart = samples_per_restart;
    budgets.tol = tol;
    return sup_norm_estimate(p, budgets, seed);
}

// Exhaustive K^n phase grid plus a Lipschitz slack: |dP/dtheta_j| <= m * l1,
// so the sup over a cell of diameter h*sqrt(n) exceeds the best grid value by
// at most m * l1 * h * sqrt(n) / 2.
inline SupNormEstimate grid_oracle(const HomogeneousPolynomial& p, int resolution) {
    const int n = p.variables();
    const int m = p.degree();
    if (n > 3) throw std::range_error("grid_oracle is limited to n <= 3");
    if (resolution < 8) throw std::invalid_argument("grid_oracle requires resolution >= 8");
    const int K = resolution;

    std::vector<Complex> pow_table(static_cast<std::size_t>(K) * (m + 1));
    for (int k = 0; k < K; ++k) {
        const double t = two_pi * k / K;
        const Complex w(std::cos(t), std::sin(t));
        pow_table[static_cast<std::size_t>(k) * (m + 1)] = Complex(1.0, 0.0);
        for (int e = 1; e <= m; ++e)
            pow_table[static_cast<std::size_t>(k) * (m + 1) + e] =
                pow_table[static_cast<std::size_t>(k) * (m + 1) + e - 1] * w;
    }

    const std::vector<int> expo = detail::exponent_table(n, m);
    const std::size_t count = p.coefficients().size();
    long long total = 1;
    for (int j = 0; j < n; ++j) total *= K;

    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    std::vector<int> best_idx(static_cast<std::size_t>(n), 0);
    double best_sq = -1.0;
    for (long long c = 0; c < total; ++c) {
        Complex acc(0.0, 0.0);
        for (std::size_t i = 0; i < count; ++i) {
            Complex term = p.coefficients()[i];
            for (int j = 0; j < n; ++j) {
                const int e = expo[i * n + static_cast<std::size_t>(j)];
                if (e != 0)
                    term *= pow_table[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)]) * (m + 1) + e];
            }
            acc += term;
        }
        const double v = std::norm(acc);
        if (v > best_sq) {
            best_sq = v;
            best_idx = idx;
        }
        for (int j = n - 1; j >= 0; --j) {
            if (++idx[static_cast<std::size_t>(j)] < K) break;
            idx[static_cast<std::size_t>(j)] = 0;
        }
    }

    std::vector<double> phases(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        phases[static_cast<std::size_t>(j)] = two_pi * best_idx[static_cast<std::size_t>(j)] / K;

    SupNormEstimate est;
    est.witness = TorusPoint(phases);
    est.lower_bound = std::abs(evaluate_on_torus(p, est.witness));
    const double h = two_pi / K;
    est.upper_bound = est.lower_bound + m * coeff_l1_norm(p) * h * std::sqrt(static_cast<double>(n)) / 2.0;
    est.restarts_used = 0;
    est.evaluations_used = total + 1;
    est.method = EstimateMethod::grid;
    return est;
}

}  // namespace bhlab
