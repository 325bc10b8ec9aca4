#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bhlab/combinatorics.hpp"
#include "bhlab/rng.hpp"

namespace bhlab {

using Complex = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi_v<double>;

inline double normalize_phase(double t) {
    double r = std::fmod(t, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
}

// A point on the distinguished boundary of the polydisc, z_j = exp(i theta_j),
// stored as phases reduced to [0, 2pi).
class TorusPoint {
public:
    TorusPoint() = default;
    explicit TorusPoint(std::vector<double> phases) : phases_(std::move(phases)) {
        for (double& t : phases_) t = normalize_phase(t);
    }

    std::size_t size() const { return phases_.size(); }
    double operator[](std::size_t j) const { return phases_[j]; }
    const std::vector<double>& phases() const { return phases_; }

    std::vector<Complex> coordinates() const {
        std::vector<Complex> z(phases_.size());
        for (std::size_t j = 0; j < phases_.size(); ++j)
            z[j] = Complex(std::cos(phases_[j]), std::sin(phases_[j]));
        return z;
    }

    bool operator==(const TorusPoint&) const = default;

private:
    std::vector<double> phases_;
};

namespace detail {

// Neumaier-compensated accumulator; keeps evaluation bit-stable and accurate
// at desk-scale coefficient counts.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace detail

// Dense m-homogeneous polynomial on C^n: coefficient i belongs to the monomial
// z^unrank(i), in colex rank order.
class HomogeneousPolynomial {
public:
    HomogeneousPolynomial(int n, int m, std::vector<Complex> coefficients)
        : n_(n), m_(m), coefficients_(std::move(coefficients)) {
        const count_t expected = multi_index_count(n, m);  // validates n, m
        if (static_cast<count_t>(coefficients_.size()) != expected)
            throw std::invalid_argument("coefficient count does not match multi_index_count(n, m)");
    }

    int variables() const { return n_; }
    int degree() const { return m_; }
    count_t coefficient_count() const { return static_cast<count_t>(coefficients_.size()); }
    const std::vector<Complex>& coefficients() const { return coefficients_; }
    Complex coefficient(count_t i) const {
        if (i < 0 || i >= coefficient_count())
            throw std::out_of_range("coefficient index outside [0, multi_index_count)");
        return coefficients_[static_cast<std::size_t>(i)];
    }

private:
    int n_;
    int m_;
    std::vector<Complex> coefficients_;
};

// Direct monomial sum. Powers are built incrementally per coordinate and the
// sum is compensated, so the result is a deterministic function of the inputs.
inline Complex evaluate(const HomogeneousPolynomial& p, std::span<const Complex> z) {
    const int n = p.variables();
    const int m = p.degree();
    if (z.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("evaluation point has wrong dimension");
    if (m == 0) return p.coefficient(0);

    std::vector<Complex> pows(static_cast<std::size_t>(n) * (m + 1));
    for (int j = 0; j < n; ++j) {
        pows[static_cast<std::size_t>(j) * (m + 1)] = Complex(1.0, 0.0);
        for (int e = 1; e <= m; ++e)
            pows[static_cast<std::size_t>(j) * (m + 1) + e] =
                pows[static_cast<std::size_t>(j) * (m + 1) + e - 1] * z[static_cast<std::size_t>(j)];
    }

    detail::CompensatedSum re, im;
    MultiIndex alpha = first_multi_index(n, m);
    count_t i = 0;
    do {
        Complex term = p.coefficients()[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            const int e = alpha[static_cast<std::size_t>(j)];
            if (e != 0) term *= pows[static_cast<std::size_t>(j) * (m + 1) + e];
        }
        re.add(term.real());
        im.add(term.imag());
        ++i;
    } while (next_multi_index(alpha));
    return {re.value(), im.value()};
}

inline Complex evaluate(const HomogeneousPolynomial& p, const std::vector<Complex>& z) {
    return evaluate(p, std::span<const Complex>(z));
}

inline Complex evaluate_on_torus(const HomogeneousPolynomial& p, const TorusPoint& t) {
    if (t.size() != static_cast<std::size_t>(p.variables()))
        throw std::invalid_argument("torus point has wrong dimension");
    return evaluate(p, t.coordinates());
}

// (sum_i |c_i|^q)^(1/q}; a quasi-norm for 0 < q < 1, applied verbatim.
inline double coeff_lq_norm(const HomogeneousPolynomial& p, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("coeff_lq_norm requires q > 0");
    double s = 0.0;
    for (const Complex& c : p.coefficients()) s += std::pow(std::abs(c), q);
    return std::pow(s, 1.0 / q);
}

inline double coeff_l1_norm(const HomogeneousPolynomial& p) {
    double s = 0.0;
    for (const Complex& c : p.coefficients()) s += std::abs(c);
    return s;
}

inline double coeff_l2_norm(const HomogeneousPolynomial& p) {
    double s = 0.0;
    for (const Complex& c : p.coefficients()) s += std::norm(c);
    return std::sqrt(s);
}

// Independent +-1 coefficients from the seeded stream; one engine draw per
// coefficient in rank order, so identical seeds give identical polynomials.
inline HomogeneousPolynomial random_sign_polynomial(int n, int m, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("random_sign_polynomial requires n >= 1");
    if (m < 2) throw std::invalid_argument("random_sign_polynomial requires m >= 2");
    const count_t count = multi_index_count(n, m);
    auto eng = make_engine(seed);
    std::vector<Complex> c(static_cast<std::size_t>(count));
    for (Complex& v : c) v = (eng() >> 63) ? Complex(-1.0, 0.0) : Complex(1.0, 0.0);
    return HomogeneousPolynomial(n, m, std::move(c));
}

inline HomogeneousPolynomial polynomial_from_monomials(
    int n, int m, const std::vector<std::pair<MultiIndex, Complex>>& terms) {
    std::vector<Complex> c(static_cast<std::size_t>(multi_index_count(n, m)), Complex(0.0, 0.0));
    for (const auto& [alpha, coef] : terms) {
        if (alpha.size() != static_cast<std::size_t>(n) || alpha.degree() != m)
            throw std::invalid_argument("monomial exponent vector does not fit (n, m)");
        c[static_cast<std::size_t>(rank(alpha))] += coef;
    }
    return HomogeneousPolynomial(n, m, std::move(c));
}

}  // namespace bhlab
