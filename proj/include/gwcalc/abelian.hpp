#pragma once

#include <algorithm>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gwcalc/numeric.hpp"

namespace gwcalc {

/// Finitely generated abelian group in invariant-factor normal form.
/// Two values are isomorphic iff free_rank and invariant_factors coincide;
/// the conditional flag marks structure known only up to order.
struct FgAbelianGroup {
    long free_rank = 0;
    std::vector<Int> invariant_factors;  // d1 | d2 | ... , each >= 2
    bool conditional = false;

    static FgAbelianGroup trivial() { return {}; }

    static FgAbelianGroup free(long rank) {
        FgAbelianGroup g;
        g.free_rank = rank;
        return g;
    }

    static FgAbelianGroup cyclic(const Int& n) {
        FgAbelianGroup g;
        if (n == 0) {
            g.free_rank = 1;
        } else if (abs_int(n) != 1) {
            g.invariant_factors.push_back(abs_int(n));
        }
        return g;
    }

    static FgAbelianGroup from_factors(long rank, std::vector<Int> factors,
                                       bool conditional = false);

    bool is_trivial() const { return free_rank == 0 && invariant_factors.empty(); }
    bool is_finite() const { return free_rank == 0; }

    // isomorphism test; the conditional flag is bookkeeping, not structure
    friend bool operator==(const FgAbelianGroup& a, const FgAbelianGroup& b) {
        return a.free_rank == b.free_rank && a.invariant_factors == b.invariant_factors;
    }
    friend bool operator!=(const FgAbelianGroup& a, const FgAbelianGroup& b) {
        return !(a == b);
    }
};

namespace detail {

// Rewrite a multiset of moduli (0 = free generator) into a divisibility
// chain d1 | d2 | ... via repeated gcd/lcm exchanges.
inline void chainify(std::vector<Int>& f) {
    for (auto& x : f) x = abs_int(x);
    auto divides = [](const Int& a, const Int& b) {
        if (b == 0) return true;
        if (a == 0) return false;
        return b % a == 0;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < f.size(); ++i)
            for (size_t j = i + 1; j < f.size(); ++j) {
                if (divides(f[i], f[j])) continue;
                Int g = gcd(f[i], f[j]);
                Int l = (f[i] == 0 || f[j] == 0) ? Int(0) : Int(f[i] / g * f[j]);
                f[i] = g;
                f[j] = l;
                changed = true;
            }
    }
    std::sort(f.begin(), f.end(), [](const Int& a, const Int& b) {
        if (a == 0) return false;  // zeros (free) to the back
        if (b == 0) return true;
        return a < b;
    });
}

}  // namespace detail

inline FgAbelianGroup FgAbelianGroup::from_factors(long rank, std::vector<Int> factors,
                                                   bool conditional) {
    detail::chainify(factors);
    FgAbelianGroup g;
    g.free_rank = rank;
    g.conditional = conditional;
    for (const auto& d : factors) {
        if (d == 0)
            ++g.free_rank;
        else if (d != 1)
            g.invariant_factors.push_back(d);
    }
    return g;
}

inline FgAbelianGroup direct_sum(const FgAbelianGroup& a, const FgAbelianGroup& b) {
    std::vector<Int> f = a.invariant_factors;
    f.insert(f.end(), b.invariant_factors.begin(), b.invariant_factors.end());
    return FgAbelianGroup::from_factors(a.free_rank + b.free_rank, std::move(f),
                                        a.conditional || b.conditional);
}

// Product of invariant factors; nullopt for infinite groups.
inline std::optional<Int> group_order(const FgAbelianGroup& g) {
    if (!g.is_finite()) return std::nullopt;
    Int n(1);
    for (const auto& d : g.invariant_factors) n *= d;
    return n;
}

// Necessary condition for exactness of 0 -> G1 -> G2 -> ... -> Gk -> 0:
// the alternating product of the orders equals 1.
inline bool exact_order_check(const std::vector<FgAbelianGroup>& seq) {
    Int even(1), odd(1);
    for (size_t i = 0; i < seq.size(); ++i) {
        auto n = group_order(seq[i]);
        if (!n) throw std::domain_error("order check requires finite groups");
        (i % 2 == 0 ? even : odd) *= *n;
    }
    return even == odd;
}

namespace detail {

inline std::string superscript(long n) {
    static const char* digits[10] = {"⁰", "¹", "²", "³", "⁴",
                                     "⁵", "⁶", "⁷", "⁸", "⁹"};
    std::string s = std::to_string(n), out;
    for (char c : s) out += digits[c - '0'];
    return out;
}

}  // namespace detail

// Paper-style rendering: ascending invariant factors, repeated factors
// collapsed into powers, e.g. "Z ⊕ Z/2", "(Z/2)³", "Z/65520".
inline std::string show(const FgAbelianGroup& g) {
    if (g.is_trivial()) return "0";
    std::vector<std::pair<std::string, long>> parts;
    for (long i = 0; i < g.free_rank; ++i) parts.emplace_back("ℤ", 1);
    size_t i = 0;
    while (i < g.invariant_factors.size()) {
        size_t j = i;
        while (j < g.invariant_factors.size() &&
               g.invariant_factors[j] == g.invariant_factors[i])
            ++j;
        parts.emplace_back("ℤ/" + g.invariant_factors[i].get_str(),
                           static_cast<long>(j - i));
        i = j;
    }
    std::string out;
    for (size_t k = 0; k < parts.size(); ++k) {
        if (k) out += " ⊕ ";
        if (parts[k].second == 1)
            out += parts[k].first;
        else
            out += "(" + parts[k].first + ")" + detail::superscript(parts[k].second);
    }
    return out;
}

inline std::ostream& operator<<(std::ostream& os, const FgAbelianGroup& g) {
    return os << show(g);
}

/// Rectangular matrix with exact integer entries.
struct IntMatrix {
    long rows = 0, cols = 0;
    std::vector<Int> a;  // row-major

    IntMatrix() = default;
    IntMatrix(long r, long c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

    static IntMatrix identity(long n) {
        IntMatrix m(n, n);
        for (long i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    static IntMatrix from_rows(const std::vector<std::vector<Int>>& r) {
        IntMatrix m(static_cast<long>(r.size()),
                    r.empty() ? 0 : static_cast<long>(r[0].size()));
        for (long i = 0; i < m.rows; ++i) {
            if (static_cast<long>(r[i].size()) != m.cols)
                throw std::invalid_argument("ragged matrix");
            for (long j = 0; j < m.cols; ++j) m.at(i, j) = r[i][j];
        }
        return m;
    }

    Int& at(long i, long j) { return a[static_cast<size_t>(i) * cols + j]; }
    const Int& at(long i, long j) const { return a[static_cast<size_t>(i) * cols + j]; }

    friend bool operator==(const IntMatrix& x, const IntMatrix& y) {
        return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
    }

    friend IntMatrix operator*(const IntMatrix& x, const IntMatrix& y) {
        if (x.cols != y.rows) throw std::invalid_argument("matrix size mismatch");
        IntMatrix z(x.rows, y.cols);
        for (long i = 0; i < x.rows; ++i)
            for (long k = 0; k < x.cols; ++k) {
                const Int& v = x.at(i, k);
                if (v == 0) continue;
                for (long j = 0; j < y.cols; ++j) z.at(i, j) += v * y.at(k, j);
            }
        return z;
    }
};

// Fraction-free determinant (Bareiss).
inline Int det(const IntMatrix& m) {
    if (m.rows != m.cols) throw std::invalid_argument("det: square matrix required");
    long n = m.rows;
    if (n == 0) return Int(1);
    IntMatrix w = m;
    Int denom(1);
    int sign = 1;
    for (long k = 0; k < n - 1; ++k) {
        if (w.at(k, k) == 0) {
            long piv = -1;
            for (long i = k + 1; i < n; ++i)
                if (w.at(i, k) != 0) {
                    piv = i;
                    break;
                }
            if (piv < 0) return Int(0);
            for (long j = 0; j < n; ++j) std::swap(w.at(k, j), w.at(piv, j));
            sign = -sign;
        }
        for (long i = k + 1; i < n; ++i)
            for (long j = k + 1; j < n; ++j) {
                w.at(i, j) = (w.at(i, j) * w.at(k, k) - w.at(i, k) * w.at(k, j)) / denom;
            }
        denom = w.at(k, k);
    }
    return sign < 0 ? Int(-w.at(n - 1, n - 1)) : w.at(n - 1, n - 1);
}

struct SnfResult {
    IntMatrix u, d, v;  // u*m*v = d, u and v unimodular, d diagonal with d1 | d2 | ...
};

// Smith normal form. Pivot selection: smallest absolute value among nonzero
// entries of the trailing submatrix, ties broken by row-major position.
inline SnfResult smith_normal_form(const IntMatrix& m) {
    SnfResult r{IntMatrix::identity(m.rows), m, IntMatrix::identity(m.cols)};
    IntMatrix& d = r.d;
    long n = std::min(m.rows, m.cols);

    auto swap_rows = [&](long i, long j) {
        if (i == j) return;
        for (long c = 0; c < d.cols; ++c) std::swap(d.at(i, c), d.at(j, c));
        for (long c = 0; c < r.u.cols; ++c) std::swap(r.u.at(i, c), r.u.at(j, c));
    };
    auto swap_cols = [&](long i, long j) {
        if (i == j) return;
        for (long c = 0; c < d.rows; ++c) std::swap(d.at(c, i), d.at(c, j));
        for (long c = 0; c < r.v.rows; ++c) std::swap(r.v.at(c, i), r.v.at(c, j));
    };
    auto add_row = [&](long dst, long src, const Int& q) {  // row dst += q*row src
        for (long c = 0; c < d.cols; ++c) d.at(dst, c) += q * d.at(src, c);
        for (long c = 0; c < r.u.cols; ++c) r.u.at(dst, c) += q * r.u.at(src, c);
    };
    auto add_col = [&](long dst, long src, const Int& q) {
        for (long c = 0; c < d.rows; ++c) d.at(c, dst) += q * d.at(c, src);
        for (long c = 0; c < r.v.rows; ++c) r.v.at(c, dst) += q * r.v.at(c, src);
    };

    for (long t = 0; t < n; ++t) {
        for (;;) {
            long pi = -1, pj = -1;
            for (long i = t; i < d.rows; ++i)
                for (long j = t; j < d.cols; ++j)
                    if (d.at(i, j) != 0 &&
                        (pi < 0 || abs_int(d.at(i, j)) < abs_int(d.at(pi, pj)))) {
                        pi = i;
                        pj = j;
                    }
            if (pi < 0) goto done;  // trailing block is zero
            swap_rows(t, pi);
            swap_cols(t, pj);

            bool clean = true;
            for (long i = t + 1; i < d.rows; ++i)
                if (d.at(i, t) != 0) {
                    Int q;
                    mpz_fdiv_q(q.get_mpz_t(), d.at(i, t).get_mpz_t(),
                               d.at(t, t).get_mpz_t());
                    add_row(i, t, Int(-q));
                    if (d.at(i, t) != 0) clean = false;
                }
            for (long j = t + 1; j < d.cols; ++j)
                if (d.at(t, j) != 0) {
                    Int q;
                    mpz_fdiv_q(q.get_mpz_t(), d.at(t, j).get_mpz_t(),
                               d.at(t, t).get_mpz_t());
                    add_col(j, t, Int(-q));
                    if (d.at(t, j) != 0) clean = false;
                }
            if (!clean) continue;

            // pivot must divide the trailing submatrix
            long bi = -1, bj = -1;
            for (long i = t + 1; i < d.rows && bi < 0; ++i)
                for (long j = t + 1; j < d.cols; ++j)
                    if (d.at(i, j) % d.at(t, t) != 0) {
                        bi = i;
                        bj = j;
                        break;
                    }
            if (bi < 0) break;
            add_row(t, bi, Int(1));
        }
        if (d.at(t, t) < 0) {
            for (long c = 0; c < d.cols; ++c) d.at(t, c) = -d.at(t, c);
            for (long c = 0; c < r.u.cols; ++c) r.u.at(t, c) = -r.u.at(t, c);
        }
    }
done:
    return r;
}

// Cokernel of Z^cols -> Z^rows presented by the relation matrix m.
inline FgAbelianGroup cokernel_group(const IntMatrix& m) {
    if (m.cols == 0) return FgAbelianGroup::free(m.rows);
    SnfResult s = smith_normal_form(m);
    std::vector<Int> factors;
    long nonzero = 0;
    for (long t = 0; t < std::min(m.rows, m.cols); ++t) {
        const Int& dt = s.d.at(t, t);
        if (dt == 0) continue;
        ++nonzero;
        if (dt != 1) factors.push_back(dt);
    }
    FgAbelianGroup g;
    g.free_rank = m.rows - nonzero;
    g.invariant_factors = std::move(factors);
    return g;
}

}  // namespace gwcalc
