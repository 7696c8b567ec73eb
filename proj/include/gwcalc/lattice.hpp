#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gwcalc/abelian.hpp"
#include "gwcalc/forms.hpp"
#include "gwcalc/numeric.hpp"
#include "gwcalc/witt.hpp"

namespace gwcalc {

/// A full-rank lattice P inside a nondegenerate rational form: the columns
/// of `basis` span P in the coordinates of the ambient Gram matrix.
struct RationalLattice {
    SymBilForm ambient;  // over Q, epsilon = +1
    QMat basis;
};

inline RationalLattice make_lattice(SymBilForm ambient, QMat basis) {
    if (ambient.domain.is_finite_field() || ambient.epsilon != 1)
        throw std::invalid_argument("lattice ambient must be a symmetric form over Q");
    size_t n = static_cast<size_t>(ambient.rank());
    if (basis.size() != n)
        throw std::invalid_argument("basis must be square of ambient rank");
    for (auto& row : basis) {
        if (row.size() != n) throw std::invalid_argument("basis must be square");
        for (auto& x : row) x.canonicalize();
    }
    if (matq::det(basis) == 0) throw std::invalid_argument("basis not invertible");
    return {std::move(ambient), std::move(basis)};
}

/// Gram matrix of the form restricted to the lattice basis: B^T G B.
inline QMat lattice_gram(const RationalLattice& l) {
    return matq::mul(matq::transpose(l.basis), matq::mul(l.ambient.gram_q, l.basis));
}

/// Dual lattice P* = { v : b(v, P) in Z }, spanned by B (B^T G B)^{-1}.
inline RationalLattice dual_lattice(const RationalLattice& l) {
    if (matq::det(l.ambient.gram_q) == 0)
        throw std::domain_error("degenerate ambient form");
    QMat a = lattice_gram(l);
    return {l.ambient, matq::mul(l.basis, matq::inverse(a))};
}

inline bool is_integral_lattice(const RationalLattice& l) {
    for (const auto& row : lattice_gram(l))
        for (const auto& x : row)
            if (x.get_den() != 1) return false;
    return true;
}

/// The finite torsion module T = P*/P with its Q/Z-valued linking form,
/// presented on generators in Smith normal form.
struct TorsionLinkingForm {
    FgAbelianGroup group;          // finite
    std::vector<Int> orders;       // generator orders, the invariant factors
    QMat generators;               // ambient coordinates, one column per generator
    QMat values;                   // linking values in [0,1), symmetric
};

inline TorsionLinkingForm torsion_linking_form(const RationalLattice& l) {
    if (!is_integral_lattice(l)) throw std::domain_error("lattice is not integral");
    QMat a = lattice_gram(l);
    size_t n = a.size();
    IntMatrix rel(static_cast<long>(n), static_cast<long>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            rel.at(static_cast<long>(i), static_cast<long>(j)) = a[i][j].get_num();
    auto s = smith_normal_form(rel);
    // T = Z^n / A Z^n in dual-basis coordinates; generator i is column i of
    // B* U^{-1}, with order d_i
    QMat dual_basis = matq::mul(l.basis, matq::inverse(a));
    QMat uinv(n, std::vector<Rat>(n, Rat(0)));
    {
        QMat uq(n, std::vector<Rat>(n, Rat(0)));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                uq[i][j] = Rat(s.u.at(static_cast<long>(i), static_cast<long>(j)));
        uinv = matq::inverse(uq);
    }
    QMat gen_all = matq::mul(dual_basis, uinv);

    TorsionLinkingForm t;
    std::vector<size_t> keep;
    for (size_t i = 0; i < n; ++i) {
        Int d = s.d.at(static_cast<long>(i), static_cast<long>(i));
        if (d == 0) throw std::logic_error("infinite torsion quotient");
        if (d == 1) continue;
        keep.push_back(i);
        t.orders.push_back(d);
    }
    t.group = FgAbelianGroup::from_factors(0, t.orders);
    size_t k = keep.size();
    t.generators.assign(n, std::vector<Rat>(k, Rat(0)));
    for (size_t c = 0; c < k; ++c)
        for (size_t i = 0; i < n; ++i) t.generators[i][c] = gen_all[i][keep[c]];
    t.values.assign(k, std::vector<Rat>(k, Rat(0)));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) {
            Rat v(0);
            for (size_t r = 0; r < n; ++r)
                for (size_t c = 0; c < n; ++c)
                    v += t.generators[r][i] * l.ambient.gram_q[r][c] * t.generators[c][j];
            t.values[i][j] = mod_one(v);
        }
    return t;
}

/// Build a torsion linking form directly from generator orders and values
/// (reduced mod 1); generators are abstract unit vectors.
inline TorsionLinkingForm make_torsion_linking_form(std::vector<Int> orders,
                                                    QMat values) {
    TorsionLinkingForm t;
    size_t k = orders.size();
    if (values.size() != k) throw std::invalid_argument("values shape mismatch");
    for (auto& row : values) {
        if (row.size() != k) throw std::invalid_argument("values shape mismatch");
        for (auto& x : row) x = mod_one(canon(x));
    }
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j)
            if (values[i][j] != values[j][i])
                throw std::invalid_argument("linking values must be symmetric");
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) {
            Rat scaled = values[i][j] * Rat(orders[i]);
            if (canon(scaled).get_den() != 1)
                throw std::invalid_argument("value orders must divide generator orders");
        }
    t.orders = std::move(orders);
    t.group = FgAbelianGroup::from_factors(0, t.orders);
    t.generators = matq::identity(static_cast<long>(k));
    t.values = std::move(values);
    return t;
}

namespace detail {

struct PPart {
    std::vector<Int> orders;  // p-powers, each >= p
    QMat values;              // linking values mod 1
};

// Split T into p-primary parts. The component of a generator g of order
// d = p^a m is (m g), of order p^a; distinct parts are orthogonal.
inline std::map<Int, PPart> p_primary_split(const TorsionLinkingForm& t) {
    std::map<Int, PPart> parts;
    std::map<Int, std::vector<std::pair<size_t, Int>>> gens;  // p -> (index, multiplier)
    std::map<Int, std::vector<Int>> orders;
    for (size_t i = 0; i < t.orders.size(); ++i) {
        for (const auto& [p, a] : factorize(t.orders[i])) {
            Int pa = pow_int(p, static_cast<unsigned long>(a));
            Int m = t.orders[i] / pa;
            gens[p].emplace_back(i, m);
            orders[p].push_back(pa);
        }
    }
    for (auto& [p, gs] : gens) {
        PPart part;
        part.orders = orders[p];
        size_t k = gs.size();
        part.values.assign(k, std::vector<Rat>(k, Rat(0)));
        for (size_t i = 0; i < k; ++i)
            for (size_t j = 0; j < k; ++j)
                part.values[i][j] =
                    mod_one(Rat(t.values[gs[i].first][gs[j].first] *
                                Rat(gs[i].second * gs[j].second)));
        parts.emplace(p, std::move(part));
    }
    return parts;
}

// One sublagrangian reduction step: quotient x^perp / <x> for an isotropic
// order-p element x, presented by integer combinations of the current
// generators. Orders and values are rewritten in Smith normal form.
inline PPart sublagrangian_step(const PPart& part, const Int& p,
                                const std::vector<Int>& x) {
    size_t k = part.orders.size();
    Int m(1);
    for (const auto& d : part.orders)
        if (d > m) m = d;
    // alpha_j = m * c(x, e_j), integers mod m
    std::vector<Int> alpha(k);
    for (size_t j = 0; j < k; ++j) {
        Rat v(0);
        for (size_t i = 0; i < k; ++i) v += Rat(x[i]) * part.values[i][j];
        Rat scaled = canon(Rat(v * Rat(m)));
        if (scaled.get_den() != 1) throw std::logic_error("linking value denominator");
        alpha[j] = scaled.get_num() % m;
        if (alpha[j] < 0) alpha[j] += m;
    }
    // unimodular V with alpha^T V = (g, 0, ..., 0)
    IntMatrix arow(1, static_cast<long>(k));
    for (size_t j = 0; j < k; ++j) arow.at(0, static_cast<long>(j)) = alpha[j];
    auto s = smith_normal_form(arow);
    Int g = s.d.at(0, 0);
    // x^perp lattice basis in generator coordinates: V * diag(m/gcd(g,m), 1, .., 1)
    Int g2 = gcd(g, m);
    IntMatrix basis(static_cast<long>(k), static_cast<long>(k));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j)
            basis.at(static_cast<long>(i), static_cast<long>(j)) =
                s.v.at(static_cast<long>(i), static_cast<long>(j)) *
                (j == 0 ? Int(m / g2) : Int(1));
    // relations of the quotient x^perp / (Lambda + Z x): columns B^{-1} * [diag(d) | x]
    QMat bq(k, std::vector<Rat>(k));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j)
            bq[i][j] = Rat(basis.at(static_cast<long>(i), static_cast<long>(j)));
    QMat binv = matq::inverse(bq);
    IntMatrix rel(static_cast<long>(k), static_cast<long>(k + 1));
    for (size_t j = 0; j < k; ++j)
        for (size_t i = 0; i < k; ++i) {
            Rat v = binv[i][j] * Rat(part.orders[j]);
            v.canonicalize();
            if (v.get_den() != 1) throw std::logic_error("relations not in x^perp");
            rel.at(static_cast<long>(i), static_cast<long>(j)) = v.get_num();
        }
    for (size_t i = 0; i < k; ++i) {
        Rat v(0);
        for (size_t j = 0; j < k; ++j) v += binv[i][j] * Rat(x[j]);
        v.canonicalize();
        if (v.get_den() != 1) throw std::logic_error("x not in x^perp");
        rel.at(static_cast<long>(i), static_cast<long>(k)) = v.get_num();
    }
    auto sr = smith_normal_form(rel);
    // new generators: columns of B * U^{-1}; values via the integer transform
    QMat uq(k, std::vector<Rat>(k));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j)
            uq[i][j] = Rat(sr.u.at(static_cast<long>(i), static_cast<long>(j)));
    QMat trans = matq::mul(bq, matq::inverse(uq));  // integer entries
    QMat cvals(k, std::vector<Rat>(k, Rat(0)));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) {
            Rat v(0);
            for (size_t a = 0; a < k; ++a)
                for (size_t b = 0; b < k; ++b)
                    v += trans[a][i] * part.values[a][b] * trans[b][j];
            cvals[i][j] = mod_one(v);
        }
    PPart out;
    std::vector<size_t> keep;
    for (size_t i = 0; i < k; ++i) {
        Int d = sr.d.at(static_cast<long>(i), static_cast<long>(i));
        if (d == 0) throw std::logic_error("quotient not finite");
        if (d == 1) continue;
        keep.push_back(i);
        out.orders.push_back(d);
    }
    out.values.assign(keep.size(), std::vector<Rat>(keep.size(), Rat(0)));
    for (size_t i = 0; i < keep.size(); ++i)
        for (size_t j = 0; j < keep.size(); ++j)
            out.values[i][j] = cvals[keep[i]][keep[j]];
    (void)p;
    return out;
}

// First isotropic nonzero element of the p-torsion subgroup, in lexicographic
// order of the coefficient vectors over the generators.
inline std::optional<std::vector<Int>> first_isotropic(const PPart& part, const Int& p) {
    size_t k = part.orders.size();
    std::vector<Int> t(k, Int(0));
    auto advance = [&]() {
        for (size_t i = k; i-- > 0;) {
            if (++t[i] < p) return true;
            t[i] = 0;
        }
        return false;
    };
    while (advance()) {
        // x = sum t_i (d_i / p) e_i
        std::vector<Int> x(k);
        for (size_t i = 0; i < k; ++i) x[i] = t[i] * (part.orders[i] / p);
        Rat self(0);
        for (size_t i = 0; i < k; ++i)
            for (size_t j = 0; j < k; ++j)
                self += Rat(x[i]) * part.values[i][j] * Rat(x[j]);
        if (mod_one(self) == 0) return x;
    }
    return std::nullopt;
}

}  // namespace detail

/// Devissage of a torsion linking form: reduce each p-primary part to an
/// elementary one by sublagrangian reduction, rescale by p, and take the
/// Witt class of the resulting F_p-valued form.
inline std::map<Int, WittClass> devissage_class(const TorsionLinkingForm& t) {
    std::map<Int, WittClass> out;
    for (auto& [p, part0] : detail::p_primary_split(t)) {
        detail::PPart part = part0;
        for (;;) {
            bool elementary = true;
            for (const auto& d : part.orders)
                if (d != p) elementary = false;
            if (elementary) break;
            if (p == 2) throw std::domain_error("dyadic devissage not supported");
            auto x = detail::first_isotropic(part, p);
            if (!x) throw std::logic_error("non-elementary part with no isotropic element");
            part = detail::sublagrangian_step(part, p, *x);
        }
        size_t k = part.orders.size();
        if (k == 0) continue;
        // rescale: b(x,y) = p * c(x,y) as an F_p-valued symmetric form
        QMat gram(k, std::vector<Rat>(k, Rat(0)));
        for (size_t i = 0; i < k; ++i)
            for (size_t j = 0; j < k; ++j) {
                Rat v = canon(Rat(part.values[i][j] * Rat(p)));
                if (v.get_den() != 1) throw std::logic_error("rescaled value not integral");
                Int r = v.get_num() % p;
                if (r < 0) r += p;
                gram[i][j] = Rat(r);
            }
        auto f = make_sym_bil_form(Domain::finite_field(p.get_si()), 1, gram);
        auto w = witt_class(f, FieldDesc::Fq(p));
        if (!witt_is_zero(w)) out.emplace(p, w);
    }
    return out;
}

/// Canonical integral lattice for tests: start from the standard basis
/// scaled by the lcm of the Gram denominators, then greedily enlarge by
/// vectors v/p while integrality is preserved.
inline RationalLattice maximal_integral_sublattice(const SymBilForm& ambient) {
    size_t n = static_cast<size_t>(ambient.rank());
    Int s(1);
    for (const auto& row : ambient.gram_q)
        for (const auto& x : row) s = lcm(s, Int(x.get_den()));
    QMat basis = matq::identity(static_cast<long>(n));
    for (size_t i = 0; i < n; ++i) basis[i][i] = Rat(s);

    auto gram_of = [&](const QMat& b) {
        return matq::mul(matq::transpose(b), matq::mul(ambient.gram_q, b));
    };

    for (;;) {
        QMat a = gram_of(basis);
        Int det_a = abs_int(Int(matq::det(a).get_num()));
        if (det_a == 1) break;
        bool enlarged = false;
        for (const auto& [p, e] : factorize(det_a)) {
            // wholesale division when A = 0 mod p^2
            bool all = true;
            for (auto& row : a)
                for (auto& x : row)
                    if (Int(x.get_num()) % (p * p) != 0) all = false;
            if (all) {
                for (auto& row : basis)
                    for (auto& x : row) x /= Rat(p);
                enlarged = true;
                break;
            }
            // kernel of A mod p; candidates c with c^T A c = 0 mod p^2
            size_t k = n;
            std::vector<std::vector<Int>> amodp(k, std::vector<Int>(k));
            for (size_t i = 0; i < k; ++i)
                for (size_t j = 0; j < k; ++j) {
                    Int r = Int(a[i][j].get_num()) % p;
                    if (r < 0) r += p;
                    amodp[i][j] = r;
                }
            // gaussian elimination over F_p to find the kernel
            std::vector<std::vector<Int>> mat = amodp;
            std::vector<long> pivot_col;
            size_t rank = 0;
            for (size_t c = 0; c < k && rank < k; ++c) {
                size_t piv = rank;
                while (piv < k && mat[piv][c] == 0) ++piv;
                if (piv == k) continue;
                std::swap(mat[piv], mat[rank]);
                Int inv;
                mpz_invert(inv.get_mpz_t(), mat[rank][c].get_mpz_t(), p.get_mpz_t());
                for (size_t j = 0; j < k; ++j) mat[rank][j] = (mat[rank][j] * inv) % p;
                for (size_t i = 0; i < k; ++i) {
                    if (i == rank || mat[i][c] == 0) continue;
                    Int f = mat[i][c];
                    for (size_t j = 0; j < k; ++j) {
                        mat[i][j] = (mat[i][j] - f * mat[rank][j]) % p;
                        if (mat[i][j] < 0) mat[i][j] += p;
                    }
                }
                pivot_col.push_back(static_cast<long>(c));
                ++rank;
            }
            std::vector<std::vector<Int>> kernel;
            std::vector<bool> is_pivot(k, false);
            for (long c : pivot_col) is_pivot[static_cast<size_t>(c)] = true;
            for (size_t c = 0; c < k; ++c) {
                if (is_pivot[c]) continue;
                std::vector<Int> v(k, Int(0));
                v[c] = 1;
                for (size_t r = 0; r < rank; ++r) {
                    Int neg = (p - mat[r][c] % p) % p;
                    v[static_cast<size_t>(pivot_col[r])] = neg;
                }
                kernel.push_back(v);
            }
            if (kernel.empty()) continue;
            // enumerate the kernel subspace, first hit wins
            size_t dim = kernel.size();
            std::vector<Int> coef(dim, Int(0));
            auto advance = [&]() {
                for (size_t i = dim; i-- > 0;) {
                    if (++coef[i] < p) return true;
                    coef[i] = 0;
                }
                return false;
            };
            while (advance() && !enlarged) {
                std::vector<Int> c(k, Int(0));
                for (size_t d = 0; d < dim; ++d)
                    for (size_t i = 0; i < k; ++i) c[i] = (c[i] + coef[d] * kernel[d][i]) % p;
                Int self(0);
                for (size_t i = 0; i < k; ++i)
                    for (size_t j = 0; j < k; ++j)
                        self += c[i] * Int(a[i][j].get_num()) * c[j];
                if (self % (p * p) != 0) continue;
                // enlarge: new lattice = current + Z * (B c / p)
                std::vector<Rat> v(n, Rat(0));
                for (size_t i = 0; i < n; ++i) {
                    for (size_t j = 0; j < k; ++j) v[i] += basis[i][j] * Rat(c[j]);
                    v[i] /= Rat(p);
                }
                // column lattice of [B | v]: clear denominators, SNF
                Int den(1);
                for (size_t i = 0; i < n; ++i) den = lcm(den, Int(v[i].get_den()));
                for (const auto& row : basis)
                    for (const auto& x : row) den = lcm(den, Int(x.get_den()));
                IntMatrix m(static_cast<long>(n), static_cast<long>(n + 1));
                for (size_t i = 0; i < n; ++i) {
                    for (size_t j = 0; j < n; ++j) {
                        Rat t = canon(Rat(basis[i][j] * Rat(den)));
                        m.at(static_cast<long>(i), static_cast<long>(j)) = t.get_num();
                    }
                    Rat t = canon(Rat(v[i] * Rat(den)));
                    m.at(static_cast<long>(i), static_cast<long>(n)) = t.get_num();
                }
                auto snf = smith_normal_form(m);
                // image lattice basis = U^{-1} * D (first n columns), over den
                QMat uinv;
                {
                    QMat uq(n, std::vector<Rat>(n));
                    for (size_t i = 0; i < n; ++i)
                        for (size_t j = 0; j < n; ++j)
                            uq[i][j] =
                                Rat(snf.u.at(static_cast<long>(i), static_cast<long>(j)));
                    uinv = matq::inverse(uq);
                }
                QMat nb(n, std::vector<Rat>(n, Rat(0)));
                for (size_t j = 0; j < n; ++j) {
                    Int dj = snf.d.at(static_cast<long>(j), static_cast<long>(j));
                    if (dj == 0) throw std::logic_error("lattice rank dropped");
                    for (size_t i = 0; i < n; ++i)
                        nb[i][j] = canon(Rat(uinv[i][j] * Rat(dj) / Rat(den)));
                }
                basis = nb;
                enlarged = true;
            }
            if (enlarged) break;
        }
        if (!enlarged) break;
    }
    return make_lattice(ambient, basis);
}

}  // namespace gwcalc
