#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gwcalc/abelian.hpp"
#include "gwcalc/forms.hpp"
#include "gwcalc/numeric.hpp"

namespace gwcalc {

/// A place of Q: a finite prime or the real place.
struct Place {
    bool infinite = false;
    Int p;

    static Place real() { return {true, Int()}; }
    static Place prime(const Int& p) { return {false, p}; }
};

/// Hilbert symbol (a,b) at a place of Q: +1 iff z^2 = a x^2 + b y^2 has a
/// nontrivial solution over the completion. Closed-form parity/Legendre rules.
inline int hilbert_symbol(const Rat& a_in, const Rat& b_in, const Place& place) {
    Rat a = canon(a_in), b = canon(b_in);
    if (a == 0 || b == 0) throw std::domain_error("hilbert_symbol: zero argument");
    if (place.infinite) return (a < 0 && b < 0) ? -1 : 1;
    const Int& p = place.p;
    long alpha = valuation(a, p), beta = valuation(b, p);
    Rat u = unit_part(a, p), v = unit_part(b, p);
    if (p == 2) {
        // units modulo 8, with eps(u) = (u-1)/2 and omega(u) = (u^2-1)/8 mod 2
        auto mod8 = [](const Rat& x) {
            Int num = x.get_num(), den = x.get_den();
            Int inv;  // denominator is odd
            Int m(8);
            mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t());
            Int r = (num * inv) % 8;
            if (r < 0) r += 8;
            return static_cast<long>(r.get_si());
        };
        long uu = mod8(u), vv = mod8(v);
        long eps_u = ((uu - 1) / 2) % 2, eps_v = ((vv - 1) / 2) % 2;
        long om_u = ((uu * uu - 1) / 8) % 2, om_v = ((vv * vv - 1) / 8) % 2;
        long e = eps_u * eps_v + (alpha % 2 != 0 ? om_v : 0) + (beta % 2 != 0 ? om_u : 0);
        return e % 2 == 0 ? 1 : -1;
    }
    auto leg = [&](const Rat& x) {
        int ln = legendre(Int(x.get_num() % p), p);
        int ld = legendre(Int(x.get_den() % p), p);
        return ln * ld;
    };
    int eps = (p % 4 == 1) ? 1 : -1;  // Legendre symbol of -1
    int r = 1;
    if (alpha % 2 != 0 && beta % 2 != 0) r *= eps;
    if (beta % 2 != 0) r *= leg(u);
    if (alpha % 2 != 0) r *= leg(v);
    return r;
}

/// Hasse invariant of a diagonal form: prod_{i<j} (a_i, a_j) at the place.
inline int hasse_invariant(const std::vector<Rat>& entries, const Place& place) {
    int s = 1;
    for (size_t i = 0; i < entries.size(); ++i)
        for (size_t j = i + 1; j < entries.size(); ++j)
            s *= hilbert_symbol(entries[i], entries[j], place);
    return s;
}

// ---------------------------------------------------------------------------
// Square classes of Q_p

/// Canonical representative of the square class of a in Q_p^x / (Q_p^x)^2.
/// Odd p: {1, u, p, p u} with u the least positive nonresidue; p = 2:
/// {1, -1, 2, -2, 5, -5, 10, -10}.
inline Int qp_square_class(const Rat& a_in, const Int& p) {
    Rat a = canon(a_in);
    if (a == 0) throw std::domain_error("qp_square_class: zero argument");
    long v = valuation(a, p) & 1L;
    Rat u = unit_part(a, p);
    if (p == 2) {
        Int num = u.get_num(), den = u.get_den(), inv, m(8);
        mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t());
        Int r = (num * inv) % 8;
        if (r < 0) r += 8;
        Int unit_rep = r == 1 ? Int(1) : r == 3 ? Int(-5) : r == 5 ? Int(5) : Int(-1);
        return v ? Int(2 * unit_rep) : unit_rep;
    }
    int leg = legendre(Int(u.get_num() % p), p) * legendre(Int(u.get_den() % p), p);
    Int unit_rep(1);
    if (leg != 1) {
        for (Int c(2);; ++c)
            if (legendre(c, p) == -1) {
                unit_rep = c;
                break;
            }
    }
    return v ? Int(p * unit_rep) : unit_rep;
}

inline Int qp_class_mul(const Int& a, const Int& b, const Int& p) {
    return qp_square_class(Rat(a * b), p);
}

// ---------------------------------------------------------------------------
// Witt classes

struct FieldDesc {
    enum class Tag { Q, R, Qp, Fq };
    Tag tag = Tag::Q;
    Int p;
    int e = 1;

    static FieldDesc Q() { return {Tag::Q, Int(), 1}; }
    static FieldDesc R() { return {Tag::R, Int(), 1}; }
    static FieldDesc Qp(const Int& p) { return {Tag::Qp, p, 1}; }
    static FieldDesc Fq(const Int& p, int e = 1) { return {Tag::Fq, p, e}; }

    Int q() const { return pow_int(p, static_cast<unsigned long>(e)); }

    friend bool operator==(const FieldDesc& a, const FieldDesc& b) {
        return a.tag == b.tag && a.p == b.p && a.e == b.e;
    }

    std::string name() const {
        switch (tag) {
            case Tag::Q: return "Q";
            case Tag::R: return "R";
            case Tag::Qp: return "Q_" + p.get_str();
            case Tag::Fq: return "F_" + q().get_str();
        }
        return "?";
    }
};

/// Complete invariants of a class in W(F_q): rank mod 2, and for odd q the
/// signed discriminant square class (true = square).
struct WittFq {
    int rank2 = 0;
    bool disc_square = true;

    friend bool operator==(const WittFq& a, const WittFq& b) = default;
};

/// Anisotropic-kernel invariants of a class in W(Q_p): rank (0..4),
/// determinant square class, Hasse invariant prod_{i<j}.
struct WittQp {
    int rank = 0;
    Int det_class = 1;
    int hasse = 1;

    friend bool operator==(const WittQp& a, const WittQp& b) = default;
};

struct WittClass {
    FieldDesc field;
    Int signature;                    // R and Q
    WittFq fq;                        // Fq
    WittQp qp;                        // Qp
    std::map<Int, WittFq> residues;   // Q: p -> W(F_p) class, nonzero entries only
};

inline bool fq_is_zero(const WittFq& w, const Int& q) {
    if (q % 2 == 0) return w.rank2 == 0;
    return w.rank2 == 0 && w.disc_square;
}

inline WittFq fq_add(const WittFq& a, const WittFq& b, const Int& q) {
    WittFq r;
    r.rank2 = (a.rank2 + b.rank2) % 2;
    if (q % 2 == 0) return r;
    // d(f+g) = d(f) d(g) (-1)^{r(f) r(g)}; -1 is a square iff q = 1 mod 4
    bool twist_nonsquare = (a.rank2 & b.rank2) != 0 && q % 4 == 3;
    r.disc_square = (a.disc_square == b.disc_square) != twist_nonsquare;
    return r;
}

namespace detail {

inline bool qp_isotropic(const WittQp& w, const Int& p) {
    Place pl = Place::prime(p);
    switch (w.rank) {
        case 0: return false;
        case 1: return false;
        case 2: return w.det_class == qp_square_class(Rat(-1), p);
        case 3:
            return w.hasse == hilbert_symbol(Rat(-1), Rat(-w.det_class), pl);
        case 4:
            return w.det_class != 1 ||
                   w.hasse == hilbert_symbol(Rat(-1), Rat(-1), pl);
        default: return true;
    }
}

// Split off hyperbolic planes until anisotropic.
inline WittQp qp_reduce(WittQp w, const Int& p) {
    while (w.rank >= 2 && qp_isotropic(w, p)) {
        w.rank -= 2;
        w.det_class = qp_class_mul(w.det_class, Int(-1), p);
        w.hasse *= hilbert_symbol(Rat(-1), Rat(w.det_class), Place::prime(p));
    }
    if (w.rank == 0) {
        w.det_class = 1;
        w.hasse = 1;
    }
    return w;
}

inline WittQp qp_from_diagonal(const std::vector<Rat>& entries, const Int& p) {
    WittQp w;
    w.rank = static_cast<int>(entries.size());
    Rat prod(1);
    for (const auto& a : entries) prod *= a;
    w.det_class = entries.empty() ? Int(1) : qp_square_class(prod, p);
    w.hasse = hasse_invariant(entries, Place::prime(p));
    return qp_reduce(w, p);
}

}  // namespace detail

inline WittQp qp_add(const WittQp& a, const WittQp& b, const Int& p) {
    WittQp s;
    s.rank = a.rank + b.rank;
    s.det_class = qp_class_mul(a.det_class, b.det_class, p);
    s.hasse = a.hasse * b.hasse *
              hilbert_symbol(Rat(a.det_class), Rat(b.det_class), Place::prime(p));
    return detail::qp_reduce(s, p);
}

inline bool witt_is_zero(const WittClass& w) {
    switch (w.field.tag) {
        case FieldDesc::Tag::R: return w.signature == 0;
        case FieldDesc::Tag::Fq: return fq_is_zero(w.fq, w.field.q());
        case FieldDesc::Tag::Qp: return w.qp.rank == 0;
        case FieldDesc::Tag::Q: return w.signature == 0 && w.residues.empty();
    }
    return false;
}

inline bool operator==(const WittClass& a, const WittClass& b) {
    if (!(a.field == b.field)) return false;
    switch (a.field.tag) {
        case FieldDesc::Tag::R: return a.signature == b.signature;
        case FieldDesc::Tag::Fq: return a.fq == b.fq;
        case FieldDesc::Tag::Qp: return a.qp == b.qp;
        case FieldDesc::Tag::Q:
            return a.signature == b.signature && a.residues == b.residues;
    }
    return false;
}

inline WittClass witt_add(const WittClass& a, const WittClass& b) {
    if (!(a.field == b.field)) throw std::invalid_argument("witt_add: field mismatch");
    WittClass r{a.field, Int(0), {}, {}, {}};
    switch (a.field.tag) {
        case FieldDesc::Tag::R: r.signature = a.signature + b.signature; break;
        case FieldDesc::Tag::Fq: r.fq = fq_add(a.fq, b.fq, a.field.q()); break;
        case FieldDesc::Tag::Qp: r.qp = qp_add(a.qp, b.qp, a.field.p); break;
        case FieldDesc::Tag::Q: {
            r.signature = a.signature + b.signature;
            r.residues = a.residues;
            for (const auto& [p, w] : b.residues) {
                auto it = r.residues.find(p);
                if (it == r.residues.end()) {
                    r.residues.emplace(p, w);
                } else {
                    it->second = fq_add(it->second, w, p);
                    if (fq_is_zero(it->second, p)) r.residues.erase(it);
                }
            }
            break;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Witt classification of forms

namespace detail {

inline std::vector<Rat> diagonal_entries(const SymBilForm& f) {
    return diagonalize_rational(f).entries;
}

inline WittFq fq_from_form(const SymBilForm& f, const Int& p, int e) {
    GaloisField F(p.get_si(), e);
    auto gram = gram_over_gf(f, F);
    if (F.is_zero(field_det(F, gram))) throw std::domain_error("singular Gram matrix");
    WittFq w;
    long n = static_cast<long>(gram.size());
    w.rank2 = static_cast<int>(n % 2);
    if (F.char2()) return w;
    auto d = field_det(F, gram);
    if ((n * (n - 1) / 2) % 2 != 0) d = F.neg(d);
    w.disc_square = F.is_square(d);
    return w;
}

}  // namespace detail

/// Second-residue boundary of a diagonal rational form at p (uniformizer p):
/// <p u> contributes <[u]> over F_p, units contribute zero.
inline WittClass second_residue(const std::vector<Rat>& entries, const Int& p) {
    WittClass out{FieldDesc::Fq(p), Int(0), {}, {}, {}};
    for (const auto& a_in : entries) {
        Rat a = canon(a_in);
        if (a == 0) throw std::domain_error("second_residue: zero entry");
        if (valuation(a, p) % 2 == 0) continue;
        Rat u = unit_part(a, p);
        WittFq term;
        term.rank2 = 1;
        if (p != 2) {
            int leg = legendre(Int(u.get_num() % p), p) *
                      legendre(Int(u.get_den() % p), p);
            term.disc_square = leg == 1;
        }
        out.fq = fq_add(out.fq, term, p);
    }
    return out;
}

inline WittClass second_residue(const SymBilForm& f, const Int& p) {
    return second_residue(detail::diagonal_entries(f), p);
}

/// Complete Witt invariants of a nondegenerate symmetric form over the field.
inline WittClass witt_class(const SymBilForm& f, const FieldDesc& field) {
    if (f.epsilon != 1) throw std::domain_error("witt_class: symmetric forms only");
    WittClass out{field, Int(0), {}, {}, {}};
    switch (field.tag) {
        case FieldDesc::Tag::R: {
            out.signature = signature(f);
            return out;
        }
        case FieldDesc::Tag::Fq: {
            out.fq = detail::fq_from_form(f, field.p, field.e);
            return out;
        }
        case FieldDesc::Tag::Qp: {
            auto entries = detail::diagonal_entries(f);
            out.qp = detail::qp_from_diagonal(entries, field.p);
            return out;
        }
        case FieldDesc::Tag::Q: {
            auto entries = detail::diagonal_entries(f);
            Int sig(0);
            for (const auto& a : entries) sig += a > 0 ? 1 : -1;
            out.signature = sig;
            std::set<Int> support;
            for (const auto& a : entries) {
                for (const auto& [p, e] : factorize(Int(a.get_num()))) support.insert(p);
                for (const auto& [p, e] : factorize(Int(a.get_den()))) support.insert(p);
            }
            for (const auto& p : support) {
                auto r = second_residue(entries, p);
                if (!fq_is_zero(r.fq, p)) out.residues.emplace(p, r.fq);
            }
            return out;
        }
    }
    throw std::logic_error("unreachable");
}

/// Group structure of the Witt group of R, F_q, or Q_p.
inline FgAbelianGroup witt_group_structure(const FieldDesc& field) {
    switch (field.tag) {
        case FieldDesc::Tag::R: return FgAbelianGroup::free(1);
        case FieldDesc::Tag::Fq: {
            Int q = field.q();
            if (q % 2 == 0) return FgAbelianGroup::cyclic(Int(2));
            if (q % 4 == 1) return FgAbelianGroup::from_factors(0, {Int(2), Int(2)});
            return FgAbelianGroup::cyclic(Int(4));
        }
        case FieldDesc::Tag::Qp: {
            if (field.p == 2)
                return FgAbelianGroup::from_factors(0, {Int(2), Int(2), Int(8)});
            auto wf = witt_group_structure(FieldDesc::Fq(field.p));
            return direct_sum(wf, wf);
        }
        case FieldDesc::Tag::Q:
            throw std::domain_error("use witt_q_decompose; W(Q) is infinitely generated");
    }
    throw std::logic_error("unreachable");
}

/// The split Milnor decomposition of W(Q): signature and all second residues.
struct QDecomposition {
    Int signature;
    std::map<Int, WittFq> residues;  // nonzero entries only
};

inline QDecomposition witt_q_decompose(const SymBilForm& f) {
    auto w = witt_class(f, FieldDesc::Q());
    return {w.signature, w.residues};
}

inline QDecomposition witt_q_decompose(const std::vector<Rat>& entries) {
    return witt_q_decompose(diag_form(entries));
}

// ---------------------------------------------------------------------------
// Enumeration of W(Q_p) and the kernel of the boundary

inline std::vector<Int> qp_class_reps(const Int& p) {
    if (p == 2)
        return {Int(1), Int(-1), Int(2), Int(-2), Int(5), Int(-5), Int(10), Int(-10)};
    Int u(1);
    for (Int c(2);; ++c)
        if (legendre(c, p) == -1) {
            u = c;
            break;
        }
    return {Int(1), u, p, Int(p * u)};
}

struct QpEnumeration {
    std::vector<WittQp> classes;             // all Witt classes, zero first
    std::vector<std::vector<Rat>> reps;      // a diagonal representative each
    FgAbelianGroup structure;                // from the multiplication table
};

namespace detail {

// Structure of a finite abelian group presented by its addition table.
inline FgAbelianGroup table_structure(size_t n, size_t zero_index,
                                      const std::vector<std::vector<size_t>>& add) {
    IntMatrix rel(static_cast<long>(n), static_cast<long>(n * n + 1));
    long col = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            rel.at(static_cast<long>(i), col) += 1;
            rel.at(static_cast<long>(j), col) += 1;
            rel.at(static_cast<long>(add[i][j]), col) -= 1;
            ++col;
        }
    rel.at(static_cast<long>(zero_index), col) = 1;
    return cokernel_group(rel);
}

}  // namespace detail

/// Enumerate all Witt classes of Q_p from diagonal forms of rank <= 4 over
/// the square-class representatives, with the group structure recovered from
/// the addition table (independent of the closed-form structure formula).
inline QpEnumeration enumerate_witt_qp(const Int& p) {
    auto reps = qp_class_reps(p);
    QpEnumeration out;
    std::map<std::pair<int, std::pair<std::string, int>>, size_t> seen;
    auto key = [](const WittQp& w) {
        return std::make_pair(w.rank, std::make_pair(w.det_class.get_str(), w.hasse));
    };
    // rank 0
    out.classes.push_back(WittQp{});
    out.reps.push_back({});
    seen[key(WittQp{})] = 0;
    std::vector<std::vector<Rat>> layer = {{}};
    for (int r = 1; r <= 4; ++r) {
        std::vector<std::vector<Rat>> next;
        for (const auto& base : layer)
            for (const auto& c : reps) {
                auto entries = base;
                entries.push_back(Rat(c));
                next.push_back(entries);
                auto w = detail::qp_from_diagonal(entries, p);
                if (!seen.count(key(w))) {
                    seen[key(w)] = out.classes.size();
                    out.classes.push_back(w);
                    out.reps.push_back(entries);
                }
            }
        layer = std::move(next);
    }
    size_t n = out.classes.size();
    std::vector<std::vector<size_t>> add(n, std::vector<size_t>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            auto s = qp_add(out.classes[i], out.classes[j], p);
            auto it = seen.find(key(s));
            if (it == seen.end()) throw std::logic_error("W(Q_p) not closed under sum");
            add[i][j] = it->second;
        }
    out.structure = detail::table_structure(n, 0, add);
    return out;
}

/// Kernel of the second-residue boundary W(Q_p) -> W(F_p): the image of
/// L_0^s of the p-adic integers. Computed by enumeration.
inline FgAbelianGroup integral_kernel_order(const Int& p) {
    auto all = enumerate_witt_qp(p);
    std::vector<size_t> kernel;
    std::map<std::pair<int, std::pair<std::string, int>>, size_t> pos;
    auto key = [](const WittQp& w) {
        return std::make_pair(w.rank, std::make_pair(w.det_class.get_str(), w.hasse));
    };
    for (size_t i = 0; i < all.classes.size(); ++i) {
        auto r = second_residue(all.reps[i], p);
        if (fq_is_zero(r.fq, p)) {
            pos[key(all.classes[i])] = kernel.size();
            kernel.push_back(i);
        }
    }
    size_t n = kernel.size();
    std::vector<std::vector<size_t>> add(n, std::vector<size_t>(n));
    for (size_t a = 0; a < n; ++a)
        for (size_t b = 0; b < n; ++b) {
            auto s = qp_add(all.classes[kernel[a]], all.classes[kernel[b]], p);
            auto it = pos.find(key(s));
            if (it == pos.end())
                throw std::logic_error("boundary kernel not closed under sum");
            add[a][b] = it->second;
        }
    return detail::table_structure(n, pos.at(key(WittQp{})), add);
}

}  // namespace gwcalc
