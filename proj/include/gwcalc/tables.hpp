#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gwcalc/abelian.hpp"
#include "gwcalc/bernoulli.hpp"
#include "gwcalc/witt.hpp"

namespace gwcalc {

/// Arithmetic data of a Dedekind ring consumed by the L-group formulas.
/// The group-valued fields are inputs (the closed forms cite them from the
/// literature); absent fields make the residues that need them error out.
struct DedekindDescriptor {
    std::string name;
    long fraction_field_char = 0;
    bool is_number_ring = true;
    long real_embeddings = 0;
    std::vector<Int> dyadic_primes;  // residue-field sizes (powers of 2)
    std::optional<FgAbelianGroup> pic_mod2;
    std::optional<FgAbelianGroup> witt_s;
    std::optional<FgAbelianGroup> witt_q;
    std::optional<FgAbelianGroup> coker_A;
    std::optional<FgAbelianGroup> quad3;  // resolved L^q_{n=3(4)} when known
};

inline DedekindDescriptor ring_z() {
    DedekindDescriptor d;
    d.name = "Z";
    d.real_embeddings = 1;
    d.dyadic_primes = {Int(2)};
    d.pic_mod2 = FgAbelianGroup::trivial();
    d.witt_s = FgAbelianGroup::free(1);
    d.witt_q = FgAbelianGroup::free(1);
    d.coker_A = FgAbelianGroup::trivial();
    d.quad3 = FgAbelianGroup::trivial();
    return d;
}

inline DedekindDescriptor ring_z_half() {
    DedekindDescriptor d;
    d.name = "Z[1/2]";
    d.real_embeddings = 1;
    d.dyadic_primes = {};  // 2 is inverted
    d.pic_mod2 = FgAbelianGroup::trivial();
    d.witt_s = FgAbelianGroup::from_factors(1, {Int(2)});
    d.witt_q = FgAbelianGroup::from_factors(1, {Int(2)});
    d.coker_A = FgAbelianGroup::trivial();
    d.quad3 = FgAbelianGroup::trivial();
    return d;
}

/// Eisenstein integers Z[zeta_3]: principal, one (inert) dyadic prime with
/// residue field F_4; W^s = Z/4, W^q = Z/2, A = Z/4 + Z/2.
inline DedekindDescriptor ring_eisenstein() {
    DedekindDescriptor d;
    d.name = "Z[zeta_3]";
    d.real_embeddings = 0;
    d.dyadic_primes = {Int(4)};
    d.pic_mod2 = FgAbelianGroup::trivial();
    d.witt_s = FgAbelianGroup::cyclic(Int(4));
    d.witt_q = FgAbelianGroup::cyclic(Int(2));
    d.coker_A = FgAbelianGroup::from_factors(0, {Int(2), Int(4)});
    d.quad3 = FgAbelianGroup::from_factors(0, {Int(2), Int(4)});
    return d;
}

/// Z[1/l] for an odd prime l. W^s = Z + W^s(F_l) by the localisation
/// sequence split by the signature; the quadratic data is not determined by
/// the descriptor inputs and is left absent.
inline DedekindDescriptor ring_z_inverted(long ell) {
    if (ell < 3 || ell % 2 == 0 || !is_prime(Int(ell)))
        throw std::invalid_argument("ring_z_inverted: odd prime required");
    DedekindDescriptor d;
    d.name = "Z[1/" + std::to_string(ell) + "]";
    d.real_embeddings = 1;
    d.dyadic_primes = {Int(2)};
    d.pic_mod2 = FgAbelianGroup::trivial();
    d.witt_s = direct_sum(FgAbelianGroup::free(1),
                          witt_group_structure(FieldDesc::Fq(Int(ell))));
    return d;
}

enum class LFlavor { Sym, SkewSym, Quad, SkewQuad, GenuineSym };

inline FgAbelianGroup l_genuine_symmetric_z(long n);

namespace detail {

inline const FgAbelianGroup& require(const std::optional<FgAbelianGroup>& g,
                                     const char* what) {
    if (!g) throw std::domain_error(std::string("insufficient ring data: ") + what);
    return *g;
}

inline long mod4(long n) { return ((n % 4) + 4) % 4; }

inline FgAbelianGroup l_sym(const DedekindDescriptor& r, long n) {
    if (r.fraction_field_char == 2) {
        // 2-periodic: W^s(R) even, Pic/2 odd
        if (((n % 2) + 2) % 2 == 0) return require(r.witt_s, "witt_s");
        return require(r.pic_mod2, "pic_mod2");
    }
    switch (mod4(n)) {
        case 0: return require(r.witt_s, "witt_s");
        case 1: {
            // sum of W^s(F_p) over dyadic primes; finite residue fields of
            // characteristic 2 each contribute Z/2
            FgAbelianGroup g;
            for (size_t i = 0; i < r.dyadic_primes.size(); ++i)
                g = direct_sum(g, FgAbelianGroup::cyclic(Int(2)));
            return g;
        }
        case 2: return FgAbelianGroup::trivial();
        case 3:
            if (!r.is_number_ring)
                throw std::domain_error(
                    "insufficient ring data: coker(boundary) needs a global fraction field");
            return require(r.pic_mod2, "pic_mod2");
    }
    throw std::logic_error("unreachable");
}

inline FgAbelianGroup l_quad(const DedekindDescriptor& r, long n) {
    if (r.fraction_field_char == 2)
        throw std::domain_error(
            "insufficient ring data: quadratic L-groups need fraction field of characteristic != 2");
    switch (mod4(n)) {
        case 0: return require(r.witt_q, "witt_q");
        case 1: return FgAbelianGroup::trivial();
        case 2: {
            // Arf invariants at the dyadic primes: W^q(F_q) = Z/2 each
            FgAbelianGroup g;
            for (size_t i = 0; i < r.dyadic_primes.size(); ++i)
                g = direct_sum(g, FgAbelianGroup::cyclic(Int(2)));
            return g;
        }
        case 3: {
            if (r.quad3) return *r.quad3;
            const auto& a = require(r.coker_A, "coker_A");
            const auto& pic = require(r.pic_mod2, "pic_mod2");
            if (a.is_trivial()) return pic;
            if (pic.is_trivial()) return a;
            // unresolved extension 0 -> A -> L -> Pic/2 -> 0
            auto g = direct_sum(a, pic);
            g.conditional = true;
            return g;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace detail

/// Closed-form L-groups of a Dedekind ring, 4-periodic in n; skew flavors
/// shift the degree by 2, genuine symmetric is supported for Z.
inline FgAbelianGroup l_group(const DedekindDescriptor& ring, LFlavor flavor, long n) {
    switch (flavor) {
        case LFlavor::Sym: return detail::l_sym(ring, n);
        case LFlavor::SkewSym: return detail::l_sym(ring, n - 2);
        case LFlavor::Quad: return detail::l_quad(ring, n);
        case LFlavor::SkewQuad: return detail::l_quad(ring, n - 2);
        case LFlavor::GenuineSym:
            if (ring.name != "Z")
                throw std::domain_error("insufficient ring data: genuine symmetric L-groups are shipped for Z only");
            return l_genuine_symmetric_z(n);
    }
    throw std::logic_error("unreachable");
}

/// Genuine symmetric L-groups of Z: 4-periodic (Z, Z/2, 0, 0) for n >= 0,
/// zero in degrees -1 and -2, and the quadratic L-groups of Z below.
inline FgAbelianGroup l_genuine_symmetric_z(long n) {
    if (n >= 0) {
        switch (n % 4) {
            case 0: return FgAbelianGroup::free(1);
            case 1: return FgAbelianGroup::cyclic(Int(2));
            default: return FgAbelianGroup::trivial();
        }
    }
    if (n == -1 || n == -2) return FgAbelianGroup::trivial();
    switch (detail::mod4(n)) {
        case 0: return FgAbelianGroup::free(1);
        case 2: return FgAbelianGroup::cyclic(Int(2));
        default: return FgAbelianGroup::trivial();
    }
}

enum class CofibreFlavor { Orthogonal, Symplectic };

/// Homotopy groups of the cofibre of L^q(Z) -> L^s(Z) (orthogonal), and its
/// double suspension (symplectic).
inline FgAbelianGroup normal_cofibre(long i, CofibreFlavor flavor) {
    if (flavor == CofibreFlavor::Symplectic)
        return normal_cofibre(i - 2, CofibreFlavor::Orthogonal);
    switch (i) {
        case 1: return FgAbelianGroup::cyclic(Int(2));
        case 0: return FgAbelianGroup::cyclic(Int(8));
        case -1: return FgAbelianGroup::cyclic(Int(2));
        default: return FgAbelianGroup::trivial();
    }
}

enum class GwFlavor { Sym, SkewSym, GenuineQuad, SkewGenuineQuad };

/// Classical Grothendieck-Witt groups of Z in degrees n >= 0, with the odd
/// K-torsion supplied by the Bernoulli pipeline.
inline FgAbelianGroup gw_group_z(GwFlavor flavor, long n, bool assume_vandiver,
                                 BernoulliTable& table) {
    if (n < 0) throw std::invalid_argument("gw_group_z: n >= 0 required");
    auto k_odd = [&](long deg) { return odd_part(k_group_z(deg, assume_vandiver, table)); };
    switch (flavor) {
        case GwFlavor::Sym: {
            if (n == 0) return FgAbelianGroup::free(2);
            long k = n / 8;
            switch (n % 8) {
                case 0: return FgAbelianGroup::from_factors(1, {Int(2)});
                case 1: return FgAbelianGroup::from_factors(0, {Int(2), Int(2), Int(2)});
                case 2:
                    return direct_sum(FgAbelianGroup::from_factors(0, {Int(2), Int(2)}),
                                      k_odd(n));
                case 3: return FgAbelianGroup::cyclic(table.w_denominator(4 * k + 2));
                case 4: return FgAbelianGroup::free(1);
                case 5: return FgAbelianGroup::trivial();
                case 6: return k_odd(n);
                case 7: return FgAbelianGroup::cyclic(table.w_denominator(4 * k + 4));
            }
            break;
        }
        case GwFlavor::SkewSym: {
            if (n == 0) return FgAbelianGroup::free(1);
            long k = n / 8;
            switch (n % 8) {
                case 0: return FgAbelianGroup::trivial();
                case 1: return FgAbelianGroup::trivial();
                case 2: return direct_sum(FgAbelianGroup::free(1), k_odd(n));
                case 3:
                    return FgAbelianGroup::cyclic(Int(2) *
                                                  table.w_denominator(4 * k + 2));
                case 4: return FgAbelianGroup::cyclic(Int(2));
                case 5: return FgAbelianGroup::cyclic(Int(2));
                case 6: return direct_sum(FgAbelianGroup::free(1), k_odd(n));
                case 7: return FgAbelianGroup::cyclic(table.w_denominator(4 * k + 4));
            }
            break;
        }
        case GwFlavor::GenuineQuad:
            if (n == 0) return FgAbelianGroup::free(2);
            if (n == 1) return FgAbelianGroup::from_factors(0, {Int(2), Int(2)});
            return gw_group_z(GwFlavor::Sym, n, assume_vandiver, table);
        case GwFlavor::SkewGenuineQuad:
            if (n == 0) return FgAbelianGroup::from_factors(1, {Int(2)});
            if (n == 1) return FgAbelianGroup::cyclic(Int(4));
            if (n == 2) return FgAbelianGroup::free(1);
            if (n == 3) return FgAbelianGroup::cyclic(Int(24));
            return gw_group_z(GwFlavor::SkewSym, n, assume_vandiver, table);
    }
    throw std::logic_error("unreachable");
}

inline std::string gw_flavor_name(GwFlavor f) {
    switch (f) {
        case GwFlavor::Sym: return "GW^s";
        case GwFlavor::SkewSym: return "GW^{-s}";
        case GwFlavor::GenuineQuad: return "GW^{gq}";
        case GwFlavor::SkewGenuineQuad: return "GW^{-gq}";
    }
    return "?";
}

inline std::string l_flavor_name(LFlavor f) {
    switch (f) {
        case LFlavor::Sym: return "L^s";
        case LFlavor::SkewSym: return "L^{-s}";
        case LFlavor::Quad: return "L^q";
        case LFlavor::SkewQuad: return "L^{-q}";
        case LFlavor::GenuineSym: return "L^{gs}";
    }
    return "?";
}

enum class TableFormat { Markdown, Json, Csv };

/// Deterministic table rendering over a degree range. Conditional entries
/// carry a trailing asterisk in the text formats and a flag in JSON.
inline std::string render_table(const std::vector<std::string>& headers,
                                const std::vector<std::vector<FgAbelianGroup>>& columns,
                                long from, TableFormat format) {
    size_t rows = columns.empty() ? 0 : columns[0].size();
    std::ostringstream out;
    auto cell = [](const FgAbelianGroup& g) {
        return show(g) + (g.conditional ? "*" : "");
    };
    switch (format) {
        case TableFormat::Markdown: {
            out << "| n |";
            for (const auto& h : headers) out << " " << h << " |";
            out << "\n|---|";
            for (size_t i = 0; i < headers.size(); ++i) out << "---|";
            out << "\n";
            for (size_t r = 0; r < rows; ++r) {
                out << "| " << (from + static_cast<long>(r)) << " |";
                for (const auto& col : columns) out << " " << cell(col[r]) << " |";
                out << "\n";
            }
            break;
        }
        case TableFormat::Csv: {
            out << "n";
            for (const auto& h : headers) out << "," << h;
            out << "\n";
            for (size_t r = 0; r < rows; ++r) {
                out << (from + static_cast<long>(r));
                for (const auto& col : columns) out << "," << cell(col[r]);
                out << "\n";
            }
            break;
        }
        case TableFormat::Json: {
            out << "{";
            for (size_t r = 0; r < rows; ++r) {
                if (r) out << ",";
                out << "\"" << (from + static_cast<long>(r)) << "\":{";
                for (size_t c = 0; c < columns.size(); ++c) {
                    if (c) out << ",";
                    const auto& g = columns[c][r];
                    out << "\"" << headers[c] << "\":{\"rank\":" << g.free_rank
                        << ",\"torsion\":[";
                    for (size_t i = 0; i < g.invariant_factors.size(); ++i) {
                        if (i) out << ",";
                        const Int& d = g.invariant_factors[i];
                        if (d.fits_slong_p())
                            out << d.get_str();
                        else
                            out << "\"" << d.get_str() << "\"";
                    }
                    out << "],\"conditional\":" << (g.conditional ? "true" : "false")
                        << "}";
                }
                out << "}";
            }
            out << "}";
            break;
        }
    }
    return out.str();
}

}  // namespace gwcalc
