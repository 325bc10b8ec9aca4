#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace bhlab {

// Exact integer combinatorics of multi-indices. All counting functions work in
// 64-bit integers over the guarded range n + m <= 64; anything that would
// overflow raises std::range_error instead of wrapping.

using count_t = std::int64_t;

namespace detail {

inline count_t checked_mul(count_t a, count_t b) {
    count_t r = 0;
    if (__builtin_mul_overflow(a, b, &r))
        throw std::range_error("integer overflow in combinatorial product");
    return r;
}

inline count_t checked_add(count_t a, count_t b) {
    count_t r = 0;
    if (__builtin_add_overflow(a, b, &r))
        throw std::range_error("integer overflow in combinatorial sum");
    return r;
}

// Pascal triangle up to row 63; every entry fits in 64 bits.
inline constexpr int pascal_rows = 64;

inline const std::array<std::array<count_t, pascal_rows>, pascal_rows>& pascal_table() {
    static const auto table = [] {
        std::array<std::array<count_t, pascal_rows>, pascal_rows> t{};
        for (int i = 0; i < pascal_rows; ++i) {
            t[i][0] = 1;
            for (int j = 1; j <= i; ++j)
                t[i][j] = t[i - 1][j - 1] + (j <= i - 1 ? t[i - 1][j] : 0);
        }
        return t;
    }();
    return table;
}

}  // namespace detail

// C(a, b), exact; a must stay within the guarded table range.
inline count_t binomial(int a, int b) {
    if (a < 0 || a >= detail::pascal_rows)
        throw std::range_error("binomial argument outside guarded range [0, 63]");
    if (b < 0 || b > a) return 0;
    return detail::pascal_table()[a][b];
}

inline count_t factorial(int m) {
    if (m < 0) throw std::invalid_argument("factorial of negative argument");
    if (m > 20) throw std::range_error("factorial exceeds 64-bit range");
    count_t r = 1;
    for (int k = 2; k <= m; ++k) r *= k;
    return r;
}

// Exponent vector alpha of a monomial z^alpha; degree() is |alpha|.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
        for (int e : exponents_)
            if (e < 0) throw std::invalid_argument("multi-index exponent must be nonnegative");
    }

    std::size_t size() const { return exponents_.size(); }
    int operator[](std::size_t j) const { return exponents_[j]; }
    int degree() const { return std::accumulate(exponents_.begin(), exponents_.end(), 0); }
    const std::vector<int>& exponents() const { return exponents_; }

    bool operator==(const MultiIndex&) const = default;

private:
    std::vector<int> exponents_;

    friend bool next_multi_index(MultiIndex& alpha);
};

// Colexicographic comparison: compare exponent vectors from the last
// coordinate backwards. This is the fixed enumeration and storage order.
inline bool colex_less(const MultiIndex& a, const MultiIndex& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("colex comparison requires equal lengths");
    for (std::size_t j = a.size(); j-- > 0;) {
        if (a[j] != b[j]) return a[j] < b[j];
    }
    return false;
}

// Number of multi-indices with |alpha| = m in n variables: C(n+m-1, m).
inline count_t multi_index_count(int n, int m) {
    if (n < 1) throw std::invalid_argument("multi_index_count requires n >= 1");
    if (m < 0) throw std::invalid_argument("multi_index_count requires m >= 0");
    if (n + m > 64) throw std::range_error("multi_index_count outside guarded range n + m <= 64");
    return binomial(n + m - 1, m);
}

// Number of square-free multi-indices (all exponents <= 1): C(n, m).
inline count_t squarefree_count(int n, int m) {
    if (n < 1) throw std::invalid_argument("squarefree_count requires n >= 1");
    if (m < 0) throw std::invalid_argument("squarefree_count requires m >= 0");
    if (n >= detail::pascal_rows)
        throw std::range_error("squarefree_count outside guarded range");
    return binomial(n, m);
}

// The count decomposition remainder p(n) = multi_index_count - squarefree_count,
// a polynomial of degree m-1 in n for fixed m.
inline count_t excess_count(int n, int m) {
    return multi_index_count(n, m) - squarefree_count(n, m);
}

// prod_{k=0}^{m-1} (n - k) = m! * squarefree_count(n, m).
inline count_t falling_factorial(int n, int m) {
    if (n < 1) throw std::invalid_argument("falling_factorial requires n >= 1");
    if (m < 0) throw std::invalid_argument("falling_factorial requires m >= 0");
    count_t r = 1;
    for (int k = 0; k < m; ++k) {
        if (n - k <= 0) return 0;
        r = detail::checked_mul(r, n - k);
    }
    return r;
}

// Multinomial m!/(alpha_1! ... alpha_n!): the number of ordered factor tuples
// with exponent profile alpha. Computed as a product of prefix binomials so
// every intermediate stays integral.
inline count_t orderings_multiplicity(const MultiIndex& alpha) {
    count_t r = 1;
    int prefix = 0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        prefix += alpha[j];
        if (prefix >= detail::pascal_rows)
            throw std::range_error("orderings_multiplicity outside guarded range");
        r = detail::checked_mul(r, binomial(prefix, alpha[j]));
    }
    return r;
}

inline MultiIndex first_multi_index(int n, int m) {
    if (n < 1) throw std::invalid_argument("first_multi_index requires n >= 1");
    if (m < 0) throw std::invalid_argument("first_multi_index requires m >= 0");
    std::vector<int> e(static_cast<std::size_t>(n), 0);
    e[0] = m;
    return MultiIndex(std::move(e));
}

// Advance alpha to its colex successor in place. Returns false (and leaves
// alpha untouched) when alpha is already the last index, i.e. (0, ..., 0, m).
inline bool next_multi_index(MultiIndex& alpha) {
    auto& e = alpha.exponents_;
    const std::size_t n = e.size();
    if (n == 0) throw std::invalid_argument("next_multi_index on empty index");
    if (e[n - 1] == alpha.degree()) return false;
    std::size_t h = 0;
    while (e[h] == 0) ++h;
    const int t = e[h];
    e[h] = 0;
    e[0] = t - 1;
    e[h + 1] += 1;
    return true;
}

// Every alpha with |alpha| = m in n variables, in colex order.
inline std::vector<MultiIndex> enumerate_multi_indices(int n, int m) {
    const count_t total = multi_index_count(n, m);
    std::vector<MultiIndex> out;
    out.reserve(static_cast<std::size_t>(total));
    MultiIndex alpha = first_multi_index(n, m);
    do {
        out.push_back(alpha);
    } while (next_multi_index(alpha));
    return out;
}

// Position of alpha in the colex enumeration. Uses the combinatorial number
// system on the nondecreasing variable indices of the monomial's factors:
// the k-th factor (0-based) in variable j contributes C(j + k, k + 1).
inline count_t rank(const MultiIndex& alpha) {
    const int n = static_cast<int>(alpha.size());
    const int m = alpha.degree();
    if (n < 1) throw std::invalid_argument("rank requires a nonempty multi-index");
    if (n + m > 64) throw std::range_error("rank outside guarded range n + m <= 64");
    count_t r = 0;
    int k = 0;
    for (int j = 0; j < n; ++j)
        for (int c = 0; c < alpha[j]; ++c) {
            r += binomial(j + k, k + 1);
            ++k;
        }
    return r;
}

// Inverse of rank for the (n, m) index family.
inline MultiIndex unrank(count_t index, int n, int m) {
    const count_t total = multi_index_count(n, m);
    if (index < 0 || index >= total)
        throw std::out_of_range("unrank index outside [0, multi_index_count)");
    std::vector<int> e(static_cast<std::size_t>(n), 0);
    count_t rem = index;
    for (int k = m; k >= 1; --k) {
        int b = k - 1;
        while (b + 1 <= n + k - 2 && binomial(b + 1, k) <= rem) ++b;
        rem -= binomial(b, k);
        e[static_cast<std::size_t>(b - (k - 1))] += 1;
    }
    return MultiIndex(std::move(e));
}

}  // namespace bhlab
