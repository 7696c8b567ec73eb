#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gwcalc/abelian.hpp"
#include "gwcalc/galois.hpp"
#include "gwcalc/numeric.hpp"

namespace gwcalc {

/// Coefficient domain of a form.
struct Domain {
    enum class Kind { Rationals, Integers, FiniteField, IntegersMod };
    Kind kind = Kind::Rationals;
    std::int64_t p = 0;  // FiniteField
    int e = 1;           // FiniteField
    Int m;               // IntegersMod

    static Domain rationals() { return {}; }
    static Domain integers() { return {Kind::Integers, 0, 1, Int()}; }
    static Domain finite_field(std::int64_t p, int e = 1) {
        return {Kind::FiniteField, p, e, Int()};
    }
    static Domain integers_mod(const Int& m) { return {Kind::IntegersMod, 0, 1, m}; }

    bool is_finite_field() const { return kind == Kind::FiniteField; }
    bool char2_field() const { return is_finite_field() && p == 2; }

    friend bool operator==(const Domain& a, const Domain& b) {
        if (a.kind != b.kind) return false;
        switch (a.kind) {
            case Kind::FiniteField: return a.p == b.p && a.e == b.e;
            case Kind::IntegersMod: return a.m == b.m;
            default: return true;
        }
    }

    std::string name() const {
        switch (kind) {
            case Kind::Rationals: return "Q";
            case Kind::Integers: return "Z";
            case Kind::FiniteField:
                return "F" + (e == 1 ? std::to_string(p)
                                     : std::to_string(p) + "^" + std::to_string(e));
            case Kind::IntegersMod: return "Z/" + m.get_str();
        }
        return "?";
    }
};

using QMat = std::vector<std::vector<Rat>>;
using GFMat = std::vector<std::vector<GaloisField::Elem>>;

namespace matq {

inline QMat identity(long n) {
    QMat m(static_cast<size_t>(n), std::vector<Rat>(static_cast<size_t>(n), Rat(0)));
    for (long i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

inline QMat mul(const QMat& a, const QMat& b) {
    size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    QMat c(n, std::vector<Rat>(m, Rat(0)));
    for (size_t i = 0; i < n; ++i)
        for (size_t t = 0; t < k; ++t) {
            if (a[i][t] == 0) continue;
            for (size_t j = 0; j < m; ++j) c[i][j] += a[i][t] * b[t][j];
        }
    return c;
}

inline QMat transpose(const QMat& a) {
    size_t n = a.size(), m = a.empty() ? 0 : a[0].size();
    QMat t(m, std::vector<Rat>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j) t[j][i] = a[i][j];
    return t;
}

inline Rat det(QMat a) {
    size_t n = a.size();
    Rat d(1);
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (piv < n && a[piv][c] == 0) ++piv;
        if (piv == n) return Rat(0);
        if (piv != c) {
            std::swap(a[piv], a[c]);
            d = -d;
        }
        d *= a[c][c];
        for (size_t i = c + 1; i < n; ++i) {
            if (a[i][c] == 0) continue;
            Rat f = a[i][c] / a[c][c];
            for (size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    return d;
}

inline QMat inverse(const QMat& m) {
    size_t n = m.size();
    QMat a = m, inv = identity(static_cast<long>(n));
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (piv < n && a[piv][c] == 0) ++piv;
        if (piv == n) throw std::domain_error("singular matrix");
        std::swap(a[piv], a[c]);
        std::swap(inv[piv], inv[c]);
        Rat f = 1 / a[c][c];
        for (size_t j = 0; j < n; ++j) {
            a[c][j] *= f;
            inv[c][j] *= f;
        }
        for (size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c] == 0) continue;
            Rat g = a[i][c];
            for (size_t j = 0; j < n; ++j) {
                a[i][j] -= g * a[c][j];
                inv[i][j] -= g * inv[c][j];
            }
        }
    }
    return inv;
}

}  // namespace matq

/// epsilon-symmetric bilinear form: gram^T = epsilon * gram.
struct SymBilForm {
    Domain domain;
    int epsilon = 1;  // +1 or -1
    QMat gram_q;      // Rationals / Integers / IntegersMod
    GFMat gram_f;     // FiniteField

    long rank() const {
        return static_cast<long>(domain.is_finite_field() ? gram_f.size()
                                                          : gram_q.size());
    }
};

/// epsilon-quadratic form stored as an upper-triangular coefficient matrix;
/// the polarization Q + epsilon*Q^T is the associated bilinear form.
struct QuadForm {
    Domain domain;
    int epsilon = 1;
    QMat upper_q;
    GFMat upper_f;

    long rank() const {
        return static_cast<long>(domain.is_finite_field() ? upper_f.size()
                                                          : upper_q.size());
    }
};

namespace detail {

inline void check_square(size_t n, const QMat& m, const char* what) {
    if (m.size() != n) throw std::invalid_argument(what);
    for (const auto& row : m)
        if (row.size() != n) throw std::invalid_argument(what);
}

inline void check_entries(const Domain& d, const QMat& m) {
    for (const auto& row : m)
        for (const auto& x : row) {
            if (d.kind == Domain::Kind::Integers && x.get_den() != 1)
                throw std::invalid_argument("integer domain requires integer entries");
            if (d.kind == Domain::Kind::IntegersMod && x.get_den() != 1)
                throw std::invalid_argument("Z/m domain requires integer entries");
        }
}

}  // namespace detail

inline SymBilForm make_sym_bil_form(Domain d, int epsilon, QMat gram) {
    if (epsilon != 1 && epsilon != -1) throw std::invalid_argument("epsilon must be +/-1");
    detail::check_square(gram.size(), gram, "gram matrix must be square");
    for (auto& row : gram)
        for (auto& x : row) x.canonicalize();
    detail::check_entries(d, gram);
    SymBilForm f{d, epsilon, {}, {}};
    if (d.is_finite_field()) {
        GaloisField F(d.p, d.e);
        size_t n = gram.size();
        f.gram_f.assign(n, std::vector<GaloisField::Elem>(n, F.zero()));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) f.gram_f[i][j] = F.from_rat(gram[i][j]);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                auto e = epsilon == 1 ? f.gram_f[j][i] : F.neg(f.gram_f[j][i]);
                if (!F.eq(f.gram_f[i][j], e))
                    throw std::invalid_argument("gram matrix is not epsilon-symmetric");
            }
    } else {
        size_t n = gram.size();
        if (d.kind == Domain::Kind::IntegersMod)
            for (auto& row : gram)
                for (auto& x : row) {
                    Int r = Int(x.get_num()) % d.m;
                    if (r < 0) r += d.m;
                    x = Rat(r);
                }
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                Rat e = epsilon == 1 ? gram[j][i] : Rat(-gram[j][i]);
                if (d.kind == Domain::Kind::IntegersMod) {
                    if ((Int(gram[i][j].get_num()) - Int(e.get_num())) % d.m != 0)
                        throw std::invalid_argument("gram matrix is not epsilon-symmetric");
                } else if (gram[i][j] != e) {
                    throw std::invalid_argument("gram matrix is not epsilon-symmetric");
                }
            }
        f.gram_q = std::move(gram);
    }
    return f;
}

inline SymBilForm make_sym_bil_form_gf(Domain d, int epsilon, GFMat gram) {
    SymBilForm f{d, epsilon, {}, std::move(gram)};
    return f;
}

inline QuadForm make_quad_form(Domain d, int epsilon, QMat upper) {
    if (epsilon != 1 && epsilon != -1) throw std::invalid_argument("epsilon must be +/-1");
    detail::check_square(upper.size(), upper, "coefficient matrix must be square");
    for (auto& row : upper)
        for (auto& x : row) x.canonicalize();
    detail::check_entries(d, upper);
    for (size_t i = 0; i < upper.size(); ++i)
        for (size_t j = 0; j < i; ++j)
            if (upper[i][j] != 0)
                throw std::invalid_argument("quadratic coefficient matrix must be upper triangular");
    QuadForm q{d, epsilon, {}, {}};
    if (d.is_finite_field()) {
        GaloisField F(d.p, d.e);
        size_t n = upper.size();
        q.upper_f.assign(n, std::vector<GaloisField::Elem>(n, F.zero()));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i; j < n; ++j) q.upper_f[i][j] = F.from_rat(upper[i][j]);
    } else {
        q.upper_q = std::move(upper);
    }
    return q;
}

/// Polarization Q + epsilon*Q^T of a quadratic form.
inline SymBilForm polarization(const QuadForm& q) {
    size_t n = static_cast<size_t>(q.rank());
    if (q.domain.is_finite_field()) {
        GaloisField F(q.domain.p, q.domain.e);
        GFMat b(n, std::vector<GaloisField::Elem>(n, F.zero()));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                auto qt = q.epsilon == 1 ? q.upper_f[j][i] : F.neg(q.upper_f[j][i]);
                b[i][j] = F.add(q.upper_f[i][j], qt);
            }
        SymBilForm f{q.domain, q.epsilon, {}, std::move(b)};
        return f;
    }
    QMat b(n, std::vector<Rat>(n, Rat(0)));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            Rat qt = q.epsilon == 1 ? q.upper_q[j][i] : Rat(-q.upper_q[j][i]);
            b[i][j] = q.upper_q[i][j] + qt;
        }
    SymBilForm f{q.domain, q.epsilon, std::move(b), {}};
    return f;
}

inline SymBilForm direct_sum(const SymBilForm& a, const SymBilForm& b) {
    if (!(a.domain == b.domain) || a.epsilon != b.epsilon)
        throw std::invalid_argument("direct_sum: mismatched forms");
    size_t n = static_cast<size_t>(a.rank()), m = static_cast<size_t>(b.rank());
    SymBilForm f{a.domain, a.epsilon, {}, {}};
    if (a.domain.is_finite_field()) {
        GaloisField F(a.domain.p, a.domain.e);
        f.gram_f.assign(n + m, std::vector<GaloisField::Elem>(n + m, F.zero()));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) f.gram_f[i][j] = a.gram_f[i][j];
        for (size_t i = 0; i < m; ++i)
            for (size_t j = 0; j < m; ++j) f.gram_f[n + i][n + j] = b.gram_f[i][j];
    } else {
        f.gram_q.assign(n + m, std::vector<Rat>(n + m, Rat(0)));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) f.gram_q[i][j] = a.gram_q[i][j];
        for (size_t i = 0; i < m; ++i)
            for (size_t j = 0; j < m; ++j) f.gram_q[n + i][n + j] = b.gram_q[i][j];
    }
    return f;
}

inline QuadForm direct_sum(const QuadForm& a, const QuadForm& b) {
    if (!(a.domain == b.domain) || a.epsilon != b.epsilon)
        throw std::invalid_argument("direct_sum: mismatched forms");
    size_t n = static_cast<size_t>(a.rank()), m = static_cast<size_t>(b.rank());
    QuadForm q{a.domain, a.epsilon, {}, {}};
    if (a.domain.is_finite_field()) {
        GaloisField F(a.domain.p, a.domain.e);
        q.upper_f.assign(n + m, std::vector<GaloisField::Elem>(n + m, F.zero()));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) q.upper_f[i][j] = a.upper_f[i][j];
        for (size_t i = 0; i < m; ++i)
            for (size_t j = 0; j < m; ++j) q.upper_f[n + i][n + j] = b.upper_f[i][j];
    } else {
        q.upper_q.assign(n + m, std::vector<Rat>(n + m, Rat(0)));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) q.upper_q[i][j] = a.upper_q[i][j];
        for (size_t i = 0; i < m; ++i)
            for (size_t j = 0; j < m; ++j) q.upper_q[n + i][n + j] = b.upper_q[i][j];
    }
    return q;
}

// ---------------------------------------------------------------------------
// Standard forms

/// E8 Dynkin Gram matrix: 2 on the diagonal, -1 on Dynkin-adjacent pairs
/// (Bourbaki labelling: chain 1-3-4-5-6-7-8 with 2 attached to 4).
inline QMat e8_gram() {
    QMat g(8, std::vector<Rat>(8, Rat(0)));
    for (int i = 0; i < 8; ++i) g[i][i] = 2;
    const int edges[7][2] = {{0, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {1, 3}};
    for (auto& e : edges) {
        g[e[0]][e[1]] = -1;
        g[e[1]][e[0]] = -1;
    }
    return g;
}

enum class StandardBilinear { HyperbolicSym, HyperbolicSkew, E8, Diag, One };

inline SymBilForm standard_bilinear(StandardBilinear kind, Domain d,
                                    const std::vector<Rat>& entries = {}) {
    switch (kind) {
        case StandardBilinear::HyperbolicSym:
            return make_sym_bil_form(d, 1, {{Rat(0), Rat(1)}, {Rat(1), Rat(0)}});
        case StandardBilinear::HyperbolicSkew:
            if (d.char2_field())
                return make_sym_bil_form(d, 1, {{Rat(0), Rat(1)}, {Rat(1), Rat(0)}});
            return make_sym_bil_form(d, -1, {{Rat(0), Rat(1)}, {Rat(-1), Rat(0)}});
        case StandardBilinear::E8:
            return make_sym_bil_form(d, 1, e8_gram());
        case StandardBilinear::One:
            if (entries.size() != 1)
                throw std::invalid_argument("one(a): exactly one entry expected");
            [[fallthrough]];
        case StandardBilinear::Diag: {
            QMat g(entries.size(), std::vector<Rat>(entries.size(), Rat(0)));
            for (size_t i = 0; i < entries.size(); ++i) g[i][i] = entries[i];
            return make_sym_bil_form(d, 1, std::move(g));
        }
    }
    throw std::logic_error("unreachable");
}

inline SymBilForm diag_form(const std::vector<Rat>& entries,
                            Domain d = Domain::rationals()) {
    return standard_bilinear(StandardBilinear::Diag, d, entries);
}

enum class StandardQuadratic { HypArf0, HypArf1, E8, Diag };

inline QuadForm standard_quadratic(StandardQuadratic kind, Domain d,
                                   const std::vector<Rat>& entries = {}) {
    switch (kind) {
        case StandardQuadratic::HypArf0:
            // q = xy on the skew hyperbolic plane
            return make_quad_form(d, -1, {{Rat(0), Rat(1)}, {Rat(0), Rat(0)}});
        case StandardQuadratic::HypArf1:
            // q = x^2 + xy + y^2
            return make_quad_form(d, -1, {{Rat(1), Rat(1)}, {Rat(0), Rat(1)}});
        case StandardQuadratic::E8: {
            // halved diagonal of the even Gram matrix
            QMat g = e8_gram();
            QMat u(8, std::vector<Rat>(8, Rat(0)));
            for (int i = 0; i < 8; ++i) {
                u[i][i] = g[i][i] / 2;
                for (int j = i + 1; j < 8; ++j) u[i][j] = g[i][j];
            }
            return make_quad_form(d, 1, std::move(u));
        }
        case StandardQuadratic::Diag: {
            if (d.char2_field())
                throw std::domain_error("no diagonal skew-quadratic forms");
            QMat u(entries.size(), std::vector<Rat>(entries.size(), Rat(0)));
            for (size_t i = 0; i < entries.size(); ++i) u[i][i] = entries[i];
            return make_quad_form(d, 1, std::move(u));
        }
    }
    throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Generic algorithms over a field concept F (RationalField or GaloisField)

template <class F>
using FieldMat = std::vector<std::vector<typename F::Elem>>;

template <class F>
FieldMat<F> field_identity(const F& K, size_t n) {
    FieldMat<F> m(n, std::vector<typename F::Elem>(n, K.zero()));
    for (size_t i = 0; i < n; ++i) m[i][i] = K.one();
    return m;
}

template <class F>
typename F::Elem field_det(const F& K, FieldMat<F> a) {
    size_t n = a.size();
    typename F::Elem d = K.one();
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (piv < n && K.is_zero(a[piv][c])) ++piv;
        if (piv == n) return K.zero();
        if (piv != c) {
            std::swap(a[piv], a[c]);
            d = K.neg(d);
        }
        d = K.mul(d, a[c][c]);
        auto ic = K.inv(a[c][c]);
        for (size_t i = c + 1; i < n; ++i) {
            if (K.is_zero(a[i][c])) continue;
            auto f = K.mul(a[i][c], ic);
            for (size_t j = c; j < n; ++j)
                a[i][j] = K.sub(a[i][j], K.mul(f, a[c][j]));
        }
    }
    return d;
}

// b(x, y) = x^T G y
template <class F>
typename F::Elem field_pair(const F& K, const FieldMat<F>& g,
                            const std::vector<typename F::Elem>& x,
                            const std::vector<typename F::Elem>& y) {
    auto s = K.zero();
    for (size_t i = 0; i < g.size(); ++i) {
        if (K.is_zero(x[i])) continue;
        for (size_t j = 0; j < g.size(); ++j)
            s = K.add(s, K.mul(x[i], K.mul(g[i][j], y[j])));
    }
    return s;
}

template <class F>
struct DiagonalizeResult {
    std::vector<typename F::Elem> entries;
    FieldMat<F> change;  // columns; change^T * G * change = diag(entries)
};

// Symmetric Gaussian elimination, characteristic != 2. Pivot: first nonzero
// diagonal entry; when the whole trailing diagonal vanishes, repair by adding
// the row (and column) of the first nonzero off-diagonal entry.
template <class F>
DiagonalizeResult<F> field_diagonalize(const F& K, FieldMat<F> w) {
    size_t n = w.size();
    DiagonalizeResult<F> out;
    out.change = field_identity(K, n);
    auto col_op = [&](size_t dst, size_t src, const typename F::Elem& lam) {
        // v_dst += lam * v_src; congruence on w: col then row
        for (size_t i = 0; i < n; ++i)
            w[i][dst] = K.add(w[i][dst], K.mul(lam, w[i][src]));
        for (size_t j = 0; j < n; ++j)
            w[dst][j] = K.add(w[dst][j], K.mul(lam, w[src][j]));
        for (size_t i = 0; i < n; ++i)
            out.change[i][dst] = K.add(out.change[i][dst], K.mul(lam, out.change[i][src]));
    };
    auto swap_basis = [&](size_t a, size_t b) {
        if (a == b) return;
        for (size_t i = 0; i < n; ++i) std::swap(w[i][a], w[i][b]);
        std::swap(w[a], w[b]);
        for (size_t i = 0; i < n; ++i) std::swap(out.change[i][a], out.change[i][b]);
    };

    for (size_t t = 0; t < n; ++t) {
        size_t piv = n;
        for (size_t i = t; i < n; ++i)
            if (!K.is_zero(w[i][i])) {
                piv = i;
                break;
            }
        if (piv == n) {
            size_t ri = n, rj = n;
            for (size_t i = t; i < n && ri == n; ++i)
                for (size_t j = i + 1; j < n; ++j)
                    if (!K.is_zero(w[i][j])) {
                        ri = i;
                        rj = j;
                        break;
                    }
            if (ri == n) throw std::domain_error("singular Gram matrix");
            col_op(ri, rj, K.one());  // w[ri][ri] becomes 2*w[ri][rj] != 0
            piv = ri;
        }
        swap_basis(t, piv);
        auto ipiv = K.inv(w[t][t]);
        for (size_t i = t + 1; i < n; ++i) {
            if (K.is_zero(w[t][i])) continue;
            col_op(i, t, K.neg(K.mul(w[t][i], ipiv)));
        }
        out.entries.push_back(w[t][t]);
    }
    return out;
}

// Change of basis to hyperbolic blocks for a nondegenerate alternating form:
// [[0,1],[-1,0]] blocks (or [[0,1],[1,0]] in characteristic 2).
template <class F>
FieldMat<F> field_symplectic_basis(const F& K, const FieldMat<F>& g, bool char2) {
    size_t n = g.size();
    if (n % 2 != 0) throw std::domain_error("not alternating");
    for (size_t i = 0; i < n; ++i)
        if (!K.is_zero(g[i][i])) throw std::domain_error("not alternating");
    std::vector<std::vector<typename F::Elem>> vecs;  // current working vectors
    for (size_t i = 0; i < n; ++i) {
        std::vector<typename F::Elem> e(n, K.zero());
        e[i] = K.one();
        vecs.push_back(e);
    }
    std::vector<std::vector<typename F::Elem>> pairs;
    while (!vecs.empty()) {
        size_t ui = 0, wi = vecs.size();
        for (size_t i = 0; i < vecs.size() && wi == vecs.size(); ++i)
            for (size_t j = i + 1; j < vecs.size(); ++j)
                if (!K.is_zero(field_pair(K, g, vecs[i], vecs[j]))) {
                    ui = i;
                    wi = j;
                    break;
                }
        if (wi == vecs.size()) throw std::domain_error("degenerate alternating form");
        auto u = vecs[ui];
        auto scale = K.inv(field_pair(K, g, u, vecs[wi]));
        std::vector<typename F::Elem> w(n, K.zero());
        for (size_t i = 0; i < n; ++i) w[i] = K.mul(scale, vecs[wi][i]);
        std::vector<std::vector<typename F::Elem>> rest;
        for (size_t k = 0; k < vecs.size(); ++k) {
            if (k == ui || k == wi) continue;
            auto bw = field_pair(K, g, vecs[k], w);
            auto bu = field_pair(K, g, vecs[k], u);
            // v' = v - b(v,w)u + b(v,u)w   (signs coincide in char 2)
            std::vector<typename F::Elem> v(n, K.zero());
            for (size_t i = 0; i < n; ++i)
                v[i] = K.add(K.sub(vecs[k][i], K.mul(bw, u[i])), K.mul(bu, w[i]));
            rest.push_back(v);
        }
        (void)char2;
        pairs.push_back(u);
        pairs.push_back(w);
        vecs = std::move(rest);
    }
    FieldMat<F> basis(n, std::vector<typename F::Elem>(n, K.zero()));
    for (size_t j = 0; j < n; ++j)
        for (size_t i = 0; i < n; ++i) basis[i][j] = pairs[j][i];
    return basis;
}

// ---------------------------------------------------------------------------
// Concrete operations

inline QMat gram_over_q(const SymBilForm& f) {
    if (f.domain.is_finite_field())
        throw std::domain_error("operation requires rational coefficients");
    return f.gram_q;
}

inline GFMat gram_over_gf(const SymBilForm& f, const GaloisField& F) {
    if (f.domain.is_finite_field()) {
        if (f.domain.p != F.p() || f.domain.e != F.degree())
            throw std::domain_error("coefficient field mismatch");
        return f.gram_f;
    }
    size_t n = static_cast<size_t>(f.rank());
    GFMat g(n, std::vector<GaloisField::Elem>(n, F.zero()));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) g[i][j] = F.from_rat(f.gram_q[i][j]);
    return g;
}

struct RationalDiagonalization {
    std::vector<Rat> entries;
    QMat change;
};

/// Diagonalize a nondegenerate symmetric form with rational (or integer)
/// coefficients over Q.
inline RationalDiagonalization diagonalize_rational(const SymBilForm& f) {
    if (f.epsilon != 1) throw std::domain_error("diagonalize: symmetric forms only");
    RationalField K;
    auto r = field_diagonalize(K, gram_over_q(f));
    return {r.entries, r.change};
}

struct GFDiagonalization {
    std::vector<GaloisField::Elem> entries;
    GFMat change;
};

inline GFDiagonalization diagonalize_gf(const SymBilForm& f, const GaloisField& F) {
    if (f.epsilon != 1) throw std::domain_error("diagonalize: symmetric forms only");
    if (F.char2())
        throw std::domain_error("characteristic 2: use symplectic_basis");
    auto r = field_diagonalize(F, gram_over_gf(f, F));
    return {r.entries, r.change};
}

/// Signature of a nondegenerate symmetric form over Q or Z.
inline Int signature(const SymBilForm& f) {
    auto d = diagonalize_rational(f);
    Int s(0);
    for (const auto& e : d.entries) s += e > 0 ? 1 : -1;
    return s;
}

/// Square-class representative of (-1)^(n(n-1)/2) det(gram).
/// Q: signed squarefree integer; F_q odd: 1 or the least nonsquare; F_{2^e}: 1.
struct Discriminant {
    Domain domain;
    Rat value_q;               // for Q
    GaloisField::Elem value_f;  // for finite fields
};

inline Discriminant discriminant(const SymBilForm& f) {
    long n = f.rank();
    bool twist = (n * (n - 1) / 2) % 2 != 0;
    if (f.domain.is_finite_field()) {
        GaloisField F(f.domain.p, f.domain.e);
        auto d = field_det(F, f.gram_f);
        if (F.is_zero(d)) throw std::domain_error("singular Gram matrix");
        if (twist) d = F.neg(d);
        Discriminant out{f.domain, Rat(0), F.zero()};
        out.value_f = F.char2() || F.is_square(d) ? F.one() : F.least_nonsquare();
        return out;
    }
    Rat d = matq::det(f.gram_q);
    if (d == 0) throw std::domain_error("singular Gram matrix");
    if (twist) d = -d;
    Discriminant out{Domain::rationals(), Rat(squarefree_part(d)), {}};
    return out;
}

/// Unimodularity of an integral form: det(gram) = +/-1.
inline bool is_unimodular(const SymBilForm& f) {
    if (f.domain.is_finite_field())
        throw std::domain_error("is_unimodular: integral forms only");
    size_t n = static_cast<size_t>(f.rank());
    IntMatrix m(static_cast<long>(n), static_cast<long>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            if (f.gram_q[i][j].get_den() != 1)
                throw std::domain_error("is_unimodular: integral forms only");
            m.at(static_cast<long>(i), static_cast<long>(j)) = f.gram_q[i][j].get_num();
        }
    return abs_int(det(m)) == 1;
}

/// Symplectic basis of a nondegenerate alternating form. Over char != 2 this
/// means epsilon = -1 with zero diagonal; over char-2 fields, symmetric with
/// zero diagonal. Returns the change of basis; for char 2 the blocks are
/// [[0,1],[1,0]], otherwise [[0,1],[-1,0]].
inline QMat symplectic_basis(const SymBilForm& f) {
    if (f.domain.is_finite_field()) {
        GaloisField F(f.domain.p, f.domain.e);
        if (F.degree() != 1)
            throw std::domain_error("symplectic_basis: rational output needs a prime field");
        if (!F.char2() && f.epsilon != -1) throw std::domain_error("not alternating");
        auto basis = field_symplectic_basis(F, f.gram_f, F.char2());
        QMat out(basis.size(), std::vector<Rat>(basis.size(), Rat(0)));
        for (size_t i = 0; i < basis.size(); ++i)
            for (size_t j = 0; j < basis.size(); ++j) out[i][j] = Rat(basis[i][j][0]);
        return out;
    }
    if (f.epsilon != -1) throw std::domain_error("not alternating");
    RationalField K;
    auto basis = field_symplectic_basis(K, f.gram_q, /*char2=*/false);
    return basis;
}

inline GFMat symplectic_basis_gf(const SymBilForm& f) {
    if (!f.domain.is_finite_field())
        throw std::domain_error("symplectic_basis_gf: finite field forms only");
    GaloisField F(f.domain.p, f.domain.e);
    if (!F.char2() && f.epsilon != -1) throw std::domain_error("not alternating");
    return field_symplectic_basis(F, f.gram_f, F.char2());
}

/// Evaluate a quadratic form: q(x) = x^T Q x.
inline GaloisField::Elem evaluate_quad(const QuadForm& q, const GaloisField& F,
                                       const std::vector<GaloisField::Elem>& x) {
    auto s = F.zero();
    size_t n = static_cast<size_t>(q.rank());
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i; j < n; ++j)
            s = F.add(s, F.mul(q.upper_f[i][j], F.mul(x[i], x[j])));
    return s;
}

inline Rat evaluate_quad(const QuadForm& q, const std::vector<Rat>& x) {
    Rat s(0);
    size_t n = static_cast<size_t>(q.rank());
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i; j < n; ++j) s += q.upper_q[i][j] * x[i] * x[j];
    return s;
}

/// Arf invariant of a quadratic form over F_{2^e} with nondegenerate
/// alternating polarization: Tr(sum q(e_i) q(f_i)) over a symplectic basis.
inline int arf_invariant(const QuadForm& q) {
    if (!q.domain.is_finite_field() || q.domain.p != 2)
        throw std::domain_error("arf_invariant: characteristic-2 field required");
    GaloisField F(2, q.domain.e);
    SymBilForm b = polarization(q);
    if (F.is_zero(field_det(F, b.gram_f)))
        throw std::domain_error("degenerate polarization");
    auto basis = field_symplectic_basis(F, b.gram_f, /*char2=*/true);
    size_t n = basis.size();
    auto s = F.zero();
    for (size_t k = 0; k + 1 < n; k += 2) {
        std::vector<GaloisField::Elem> e(n, F.zero()), fvec(n, F.zero());
        for (size_t i = 0; i < n; ++i) {
            e[i] = basis[i][k];
            fvec[i] = basis[i][k + 1];
        }
        s = F.add(s, F.mul(evaluate_quad(q, F, e), evaluate_quad(q, F, fvec)));
    }
    return static_cast<int>(F.trace(s) % 2);
}

// ---------------------------------------------------------------------------
// Strict Lagrangians

enum class LagrangianStatus { Found, DoesNotExist, NotFoundWithinBound };

struct LagrangianResult {
    LagrangianStatus status;
    QMat basis;  // columns span the Lagrangian (half rank), when found
};

namespace detail {

// Exhaustive search over a finite field: split off hyperbolic planes through
// successive isotropic vectors (first in enumeration order).
inline std::optional<GFMat> gf_lagrangian(const GaloisField& F, const GFMat& g,
                                          const QuadForm* quad) {
    size_t n = g.size();
    // working subspace basis, ambient coords
    GFMat basis(n, std::vector<GaloisField::Elem>(n, F.zero()));
    for (size_t i = 0; i < n; ++i) basis[i][i] = F.one();
    size_t dim = n;
    GFMat lagr;  // collected Lagrangian vectors (ambient coords)

    auto ambient = [&](const std::vector<GaloisField::Elem>& c) {
        std::vector<GaloisField::Elem> v(n, F.zero());
        for (size_t j = 0; j < dim; ++j)
            for (size_t i = 0; i < n; ++i)
                v[i] = F.add(v[i], F.mul(c[j], basis[i][j]));
        return v;
    };

    while (dim > 0) {
        // find first isotropic nonzero vector in coordinate enumeration order
        std::vector<GaloisField::Elem> c(dim, F.zero());
        std::optional<std::vector<GaloisField::Elem>> found;
        auto advance = [&]() {
            for (size_t i = 0; i < dim; ++i) {
                if (F.next(c[i])) return true;
                // F.next wraps c[i] to zero and reports false
            }
            return false;
        };
        while (advance()) {
            auto v = ambient(c);
            bool iso;
            if (quad)
                iso = F.is_zero(evaluate_quad(*quad, F, v));
            else
                iso = F.is_zero(field_pair(F, g, v, v));
            if (iso) {
                found = v;
                break;
            }
        }
        if (!found) return std::nullopt;  // anisotropic: no Lagrangian
        auto v = *found;
        // partner with b(v, u) != 0 among current basis vectors
        size_t pi = dim;
        for (size_t j = 0; j < dim; ++j) {
            std::vector<GaloisField::Elem> bj(n, F.zero());
            for (size_t i = 0; i < n; ++i) bj[i] = basis[i][j];
            if (!F.is_zero(field_pair(F, g, v, bj))) {
                pi = j;
                break;
            }
        }
        if (pi == dim) throw std::domain_error("degenerate form");
        std::vector<GaloisField::Elem> u(n, F.zero());
        for (size_t i = 0; i < n; ++i) u[i] = basis[i][pi];
        // complement: vectors x' = x - alpha v - beta u with b(x',v) = b(x',u) = 0,
        // using b(v,v) = 0
        auto bvu = field_pair(F, g, v, u);
        auto buv = field_pair(F, g, u, v);
        auto buu = field_pair(F, g, u, u);
        std::vector<std::vector<GaloisField::Elem>> cand;
        for (size_t j = 0; j < dim; ++j) {
            std::vector<GaloisField::Elem> bj(n, F.zero());
            for (size_t i = 0; i < n; ++i) bj[i] = basis[i][j];
            cand.push_back(bj);
        }
        std::vector<std::vector<GaloisField::Elem>> comp;
        for (auto& x : cand) {
            auto xv = field_pair(F, g, x, v);
            auto xu = field_pair(F, g, x, u);
            auto beta = F.mul(xv, F.inv(buv));
            auto alpha = F.mul(F.sub(xu, F.mul(beta, buu)), F.inv(bvu));
            std::vector<GaloisField::Elem> xp(n, F.zero());
            for (size_t i = 0; i < n; ++i)
                xp[i] = F.sub(x[i], F.add(F.mul(alpha, v[i]), F.mul(beta, u[i])));
            comp.push_back(xp);
        }
        // reduce comp to an independent basis of dimension dim-2
        std::vector<std::vector<GaloisField::Elem>> rows;  // echelon bookkeeping
        std::vector<std::vector<GaloisField::Elem>> kept;
        for (auto& x : comp) {
            auto y = x;
            for (auto& r : rows) {
                size_t lead = 0;
                while (lead < n && F.is_zero(r[lead])) ++lead;
                if (lead < n && !F.is_zero(y[lead])) {
                    auto fct = F.mul(y[lead], F.inv(r[lead]));
                    for (size_t i = 0; i < n; ++i)
                        y[i] = F.sub(y[i], F.mul(fct, r[i]));
                }
            }
            bool zero = true;
            for (size_t i = 0; i < n; ++i)
                if (!F.is_zero(y[i])) zero = false;
            if (!zero) {
                rows.push_back(y);
                kept.push_back(x);
            }
            if (kept.size() == dim - 2) break;
        }
        if (kept.size() != dim - 2)
            throw std::logic_error("complement dimension mismatch");
        GFMat nb(n, std::vector<GaloisField::Elem>(dim - 2, F.zero()));
        for (size_t j = 0; j < dim - 2; ++j)
            for (size_t i = 0; i < n; ++i) nb[i][j] = kept[j][i];
        lagr.push_back(v);  // store as row; transpose at the end
        basis = nb;
        dim -= 2;
    }
    GFMat out(n, std::vector<GaloisField::Elem>(lagr.size(), F.zero()));
    for (size_t j = 0; j < lagr.size(); ++j)
        for (size_t i = 0; i < n; ++i) out[i][j] = lagr[j][i];
    return out;
}

inline bool snf_all_ones(const IntMatrix& m) {
    auto s = smith_normal_form(m);
    long n = std::min(m.rows, m.cols);
    for (long t = 0; t < n; ++t)
        if (s.d.at(t, t) != 1) return false;
    return true;
}

}  // namespace detail

/// Search for a strict Lagrangian: a half-rank direct summand on which the
/// form (and its quadratic refinement, when given) vanishes. Exhaustive over
/// finite fields; box search with coefficients in [-bound, bound] over Z.
inline LagrangianResult find_strict_lagrangian(const SymBilForm& f,
                                               const QuadForm* quad = nullptr,
                                               long bound = 5) {
    long n = f.rank();
    if (n % 2 != 0) throw std::domain_error("find_strict_lagrangian: rank must be even");
    if (f.domain.is_finite_field()) {
        GaloisField F(f.domain.p, f.domain.e);
        if (F.is_zero(field_det(F, f.gram_f)))
            throw std::domain_error("degenerate form");
        auto r = detail::gf_lagrangian(F, f.gram_f, quad);
        if (!r) return {LagrangianStatus::DoesNotExist, {}};
        QMat basis;
        if (F.degree() == 1) {
            basis.assign(static_cast<size_t>(n),
                         std::vector<Rat>(static_cast<size_t>(n / 2)));
            for (long i = 0; i < n; ++i)
                for (long j = 0; j < n / 2; ++j)
                    basis[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                        Rat((*r)[static_cast<size_t>(i)][static_cast<size_t>(j)][0]);
        }
        return {LagrangianStatus::Found, basis};
    }
    if (f.domain.kind == Domain::Kind::IntegersMod)
        throw std::domain_error("find_strict_lagrangian: Z/m coefficients unsupported");

    // integral box search
    size_t un = static_cast<size_t>(n);
    std::vector<std::vector<Int>> pool;
    std::vector<Int> v(un, Int(0));
    auto advance = [&]() {
        for (size_t i = 0; i < un; ++i) {
            if (v[i] < bound) {
                ++v[i];
                return true;
            }
            v[i] = -bound;
        }
        return false;
    };
    auto pair_int = [&](const std::vector<Int>& x, const std::vector<Int>& y) {
        Rat s(0);
        for (size_t i = 0; i < un; ++i)
            for (size_t j = 0; j < un; ++j) s += Rat(x[i]) * f.gram_q[i][j] * Rat(y[j]);
        return s;
    };
    for (auto& x : v) x = -bound;
    v[0] -= 1;  // so the first advance yields the all -bound vector
    while (advance()) {
        bool zerov = true;
        Int g(0);
        int first_sign = 0;
        for (auto& x : v) {
            if (x != 0) {
                zerov = false;
                if (first_sign == 0) first_sign = x < 0 ? -1 : 1;
            }
            g = gcd(g, x);
        }
        if (zerov || g != 1 || first_sign < 0) continue;  // primitive, normalized
        if (pair_int(v, v) != 0) continue;
        if (quad) {
            std::vector<Rat> vr(un);
            for (size_t i = 0; i < un; ++i) vr[i] = Rat(v[i]);
            if (evaluate_quad(*quad, vr) != 0) continue;
        }
        pool.push_back(v);
    }

    std::vector<size_t> chosen;
    size_t want = un / 2;
    // depth-first extension over the pool in order
    std::vector<size_t> stack;
    size_t start = 0;
    for (;;) {
        bool extended = false;
        for (size_t i = start; i < pool.size(); ++i) {
            bool ok = true;
            for (size_t c : stack)
                if (pair_int(pool[c], pool[i]) != 0) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            // candidate must keep the span a direct summand
            IntMatrix m(static_cast<long>(stack.size() + 1), n);
            for (size_t r = 0; r < stack.size(); ++r)
                for (long j = 0; j < n; ++j) m.at(static_cast<long>(r), j) = pool[stack[r]][static_cast<size_t>(j)];
            for (long j = 0; j < n; ++j)
                m.at(static_cast<long>(stack.size()), j) = pool[i][static_cast<size_t>(j)];
            if (!detail::snf_all_ones(m)) continue;
            stack.push_back(i);
            extended = true;
            start = i + 1;
            break;
        }
        if (extended && stack.size() == want) {
            // verify surjectivity onto the dual of L
            IntMatrix mt(n, static_cast<long>(want));
            for (size_t c = 0; c < want; ++c)
                for (long i = 0; i < n; ++i)
                    mt.at(i, static_cast<long>(c)) = pool[stack[c]][static_cast<size_t>(i)];
            // pairings matrix (G * M) needs integer entries and full SNF 1s
            bool integral = true;
            IntMatrix gm(n, static_cast<long>(want));
            for (long i = 0; i < n && integral; ++i)
                for (size_t c = 0; c < want; ++c) {
                    Rat s(0);
                    for (long j = 0; j < n; ++j)
                        s += f.gram_q[static_cast<size_t>(i)][static_cast<size_t>(j)] *
                             Rat(pool[stack[c]][static_cast<size_t>(j)]);
                    if (s.get_den() != 1) {
                        integral = false;
                        break;
                    }
                    gm.at(i, static_cast<long>(c)) = s.get_num();
                }
            if (integral && detail::snf_all_ones(gm)) {
                QMat basis(un, std::vector<Rat>(want));
                for (size_t c = 0; c < want; ++c)
                    for (size_t i = 0; i < un; ++i) basis[i][c] = Rat(pool[stack[c]][i]);
                return {LagrangianStatus::Found, basis};
            }
            // treat as dead end; backtrack
            start = stack.back() + 1;
            stack.pop_back();
            continue;
        }
        if (!extended) {
            if (stack.empty()) break;
            start = stack.back() + 1;
            stack.pop_back();
        }
    }
    return {LagrangianStatus::NotFoundWithinBound, {}};
}

inline LagrangianResult find_strict_lagrangian(const QuadForm& q, long bound = 5) {
    SymBilForm b = polarization(q);
    return find_strict_lagrangian(b, &q, bound);
}

}  // namespace gwcalc
