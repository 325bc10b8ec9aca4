#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bhlab/combinatorics.hpp"
#include "bhlab/polynomial.hpp"
#include "bhlab/rng.hpp"
#include "bhlab/supnorm.hpp"

namespace bhlab {

// Handle to the unique symmetric m-linear form T with T(z,...,z) = P(z).
// T is never materialized: its entry on a tuple with exponent profile alpha
// is c_alpha / orderings_multiplicity(alpha). Tuple indices are 0-based.
class SymmetricForm {
public:
    explicit SymmetricForm(std::shared_ptr<const HomogeneousPolynomial> source)
        : source_(std::move(source)) {
        if (!source_) throw std::invalid_argument("SymmetricForm requires a source polynomial");
        if (source_->degree() < 1) throw std::invalid_argument("SymmetricForm requires degree >= 1");
    }
    explicit SymmetricForm(HomogeneousPolynomial source)
        : SymmetricForm(std::make_shared<const HomogeneousPolynomial>(std::move(source))) {}

    const HomogeneousPolynomial& source() const { return *source_; }
    int variables() const { return source_->variables(); }
    int arity() const { return source_->degree(); }

private:
    std::shared_ptr<const HomogeneousPolynomial> source_;
};

inline Complex form_entry(const SymmetricForm& form, std::span<const int> tuple) {
    const int n = form.variables();
    const int m = form.arity();
    if (tuple.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("tuple must contain exactly m indices");
    std::vector<int> exponents(static_cast<std::size_t>(n), 0);
    for (int i : tuple) {
        if (i < 0 || i >= n) throw std::invalid_argument("tuple index outside [0, n)");
        ++exponents[static_cast<std::size_t>(i)];
    }
    MultiIndex alpha(std::move(exponents));
    const count_t multiplicity = orderings_multiplicity(alpha);
    return form.source().coefficient(rank(alpha)) / static_cast<double>(multiplicity);
}

inline Complex form_entry(const SymmetricForm& form, const std::vector<int>& tuple) {
    return form_entry(form, std::span<const int>(tuple));
}

// Polarization identity: T(z_1,...,z_m) = (1/(2^m m!)) sum over sign vectors
// of (prod eps_k) P(sum_k eps_k z_k). Masks are visited in increasing order
// and the outer sum is compensated, so the result is bit-stable.
inline Complex evaluate_form(const SymmetricForm& form,
                             const std::vector<std::vector<Complex>>& points) {
    const int n = form.variables();
    const int m = form.arity();
    if (points.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("evaluate_form needs exactly m argument vectors");
    for (const auto& pt : points)
        if (pt.size() != static_cast<std::size_t>(n))
            throw std::invalid_argument("argument vector has wrong dimension");

    detail::CompensatedSum re, im;
    std::vector<Complex> combo(static_cast<std::size_t>(n));
    const unsigned masks = 1u << m;
    for (unsigned mask = 0; mask < masks; ++mask) {
        std::fill(combo.begin(), combo.end(), Complex(0.0, 0.0));
        int sign = 1;
        for (int k = 0; k < m; ++k) {
            const bool flip = (mask >> k) & 1u;
            if (flip) sign = -sign;
            const double eps = flip ? -1.0 : 1.0;
            for (int j = 0; j < n; ++j)
                combo[static_cast<std::size_t>(j)] += eps * points[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
        }
        const Complex v = evaluate(form.source(), combo);
        re.add(sign * v.real());
        im.add(sign * v.imag());
    }
    const double scale = 1.0 / (std::ldexp(1.0, m) * static_cast<double>(factorial(m)));
    return {re.value() * scale, im.value() * scale};
}

// (sum over tuples |T(e_tuple)|^q)^{1/q} folded over multi-indices: each
// profile alpha contributes multiplicity * |c_alpha / multiplicity|^q.
inline double tensor_lq_norm(const SymmetricForm& form, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("tensor_lq_norm requires q > 0");
    const auto& coeffs = form.source().coefficients();
    double s = 0.0;
    MultiIndex alpha = first_multi_index(form.variables(), form.arity());
    count_t i = 0;
    do {
        const double multiplicity = static_cast<double>(orderings_multiplicity(alpha));
        const double a = std::abs(coeffs[static_cast<std::size_t>(i)]);
        if (a != 0.0) s += multiplicity * std::pow(a / multiplicity, q);
        ++i;
    } while (next_multi_index(alpha));
    return std::pow(s, 1.0 / q);
}

namespace detail {

inline std::vector<std::vector<Complex>> points_from_phases(const std::vector<double>& phases,
                                                            int m, int n) {
    std::vector<std::vector<Complex>> points(static_cast<std::size_t>(m),
                                             std::vector<Complex>(static_cast<std::size_t>(n)));
    for (int k = 0; k < m; ++k)
        for (int j = 0; j < n; ++j) {
            const double t = phases[static_cast<std::size_t>(k) * n + static_cast<std::size_t>(j)];
            points[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] =
                Complex(std::cos(t), std::sin(t));
        }
    return points;
}

// One ascent pass shared by all restarts. T is affine in each coordinate
// z_{k,j}, so the per-coordinate maximizer is exact: with T = A + z_{k,j} B,
// the best phase aligns A and B to reach |A| + |B|.
inline SupNormEstimate form_phase_ascent(const SymmetricForm& form, std::vector<double> phases,
                                         double tol, int max_sweeps, long long& evals) {
    const int n = form.variables();
    const int m = form.arity();
    auto points = points_from_phases(phases, m, n);
    double current = std::abs(evaluate_form(form, points));
    ++evals;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        const double sweep_base = current;
        for (int k = 0; k < m; ++k) {
            for (int j = 0; j < n; ++j) {
                auto& slot = points[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
                const Complex saved = slot;
                slot = Complex(0.0, 0.0);
                const Complex a = evaluate_form(form, points);
                slot = Complex(1.0, 0.0);
                const Complex b = evaluate_form(form, points) - a;
                evals += 2;
                if (std::abs(b) == 0.0) {
                    slot = saved;
                    continue;
                }
                const double t = normalize_phase(
                    std::abs(a) == 0.0 ? std::atan2(-b.imag(), b.real())
                                       : std::atan2(a.imag(), a.real()) - std::atan2(b.imag(), b.real()));
                const Complex w(std::cos(t), std::sin(t));
                const double cand = std::abs(a + w * b);
                if (cand > current) {
                    slot = w;
                    phases[static_cast<std::size_t>(k) * n + static_cast<std::size_t>(j)] = t;
                    current = cand;
                } else {
                    slot = saved;
                }
            }
        }
        if (current - sweep_base < tol) break;
    }

    SupNormEstimate est;
    est.witness = TorusPoint(phases);
    est.lower_bound = std::abs(evaluate_form(form, points_from_phases(est.witness.phases(), m, n)));
    ++evals;
    est.method = EstimateMethod::ascent;
    return est;
}

}  // namespace detail

// Multistart ascent over all m*n phases. Restart 0 starts from the diagonal
// witness of sup_norm_estimate(P) with the same budgets and seed, so the
// result dominates the polynomial estimate up to roundoff; the remaining
// restarts use random starts with per-restart derived seeds.
inline SupNormEstimate form_sup_estimate(const SymmetricForm& form,
                                         const SupNormBudgets& budgets = {},
                                         std::uint64_t seed = 0) {
    if (budgets.restarts < 1) throw std::invalid_argument("form_sup_estimate requires restarts >= 1");
    if (budgets.samples_per_restart < 1)
        throw std::invalid_argument("form_sup_estimate requires samples_per_restart >= 1");
    if (!(budgets.tol > 0.0)) throw std::invalid_argument("form_sup_estimate requires tol > 0");
    const int n = form.variables();
    const int m = form.arity();
    const std::size_t dim = static_cast<std::size_t>(m) * static_cast<std::size_t>(n);

    const SupNormEstimate diag = sup_norm_estimate(form.source(), budgets, seed);
    long long evals = diag.evaluations_used;

    SupNormEstimate best;
    best.lower_bound = -1.0;
    for (int r = 0; r < budgets.restarts; ++r) {
        std::vector<double> start(dim);
        if (r == 0) {
            for (int k = 0; k < m; ++k)
                for (int j = 0; j < n; ++j)
                    start[static_cast<std::size_t>(k) * n + static_cast<std::size_t>(j)] =
                        diag.witness[static_cast<std::size_t>(j)];
        } else {
            auto eng = make_engine(derive_seed(seed, static_cast<std::uint64_t>(r)));
            double best_sample = -1.0;
            std::vector<double> probe(dim);
            for (int s = 0; s < budgets.samples_per_restart; ++s) {
                for (double& t : probe) t = two_pi * uniform_unit(eng);
                const double v =
                    std::abs(evaluate_form(form, detail::points_from_phases(probe, m, n)));
                ++evals;
                if (v > best_sample) {
                    best_sample = v;
                    start = probe;
                }
            }
        }
        SupNormEstimate attempt =
            detail::form_phase_ascent(form, std::move(start), budgets.tol, budgets.max_sweeps, evals);
        if (attempt.lower_bound > best.lower_bound) best = attempt;
    }

    best.restarts_used = budgets.restarts;
    best.evaluations_used = evals;
    best.method = EstimateMethod::ascent;
    return best;
}

}  // namespace bhlab
