#pragma once

#include <json.hpp>

#include <string>

#include "gwcalc/abelian.hpp"
#include "gwcalc/forms.hpp"
#include "gwcalc/lattice.hpp"
#include "gwcalc/witt.hpp"

namespace gwcalc {

using json = nlohmann::ordered_json;

// Exact scalars: integers that fit in int64 stay numbers, everything else is
// a decimal string, rationals as "a/b".
inline json rat_to_json(const Rat& x) {
    if (x.get_den() == 1 && x.get_num().fits_slong_p())
        return json(x.get_num().get_si());
    return json(x.get_str());
}

inline json int_to_json(const Int& x) {
    if (x.fits_slong_p()) return json(x.get_si());
    return json(x.get_str());
}

inline Rat rat_from_json(const json& j) {
    if (j.is_number_integer()) return Rat(static_cast<long>(j.get<std::int64_t>()));
    if (j.is_string()) return parse_rational(j.get<std::string>());
    throw std::invalid_argument("expected an exact number (integer or \"a/b\" string)");
}

inline Int int_from_json(const json& j) {
    Rat r = rat_from_json(j);
    if (r.get_den() != 1) throw std::invalid_argument("expected an integer");
    return Int(r.get_num());
}

// ---------------------------------------------------------------------------
// FgAbelianGroup <-> {"rank": n, "torsion": [...], "conditional": bool}

inline json to_json(const FgAbelianGroup& g) {
    json t = json::array();
    for (const auto& d : g.invariant_factors) t.push_back(int_to_json(d));
    return json{{"rank", g.free_rank}, {"torsion", t}, {"conditional", g.conditional}};
}

inline FgAbelianGroup group_from_json(const json& j) {
    FgAbelianGroup g;
    g.free_rank = j.at("rank").get<long>();
    std::vector<Int> f;
    for (const auto& d : j.at("torsion")) f.push_back(int_from_json(d));
    g = FgAbelianGroup::from_factors(g.free_rank, f);
    if (j.contains("conditional")) g.conditional = j.at("conditional").get<bool>();
    return g;
}

// ---------------------------------------------------------------------------
// Domain

inline json to_json(const Domain& d) {
    switch (d.kind) {
        case Domain::Kind::Rationals: return json{{"type", "Q"}};
        case Domain::Kind::Integers: return json{{"type", "Z"}};
        case Domain::Kind::FiniteField: {
            json out{{"type", "Fq"}, {"p", d.p}, {"e", d.e}};
            if (d.e > 1) {
                GaloisField F(d.p, d.e);
                json mod = json::array();
                for (auto c : F.modulus()) mod.push_back(c);
                mod.push_back(1);  // monic leading coefficient
                out["modulus"] = mod;
            }
            return out;
        }
        case Domain::Kind::IntegersMod: return json{{"type", "Zmod"}, {"m", int_to_json(d.m)}};
    }
    throw std::logic_error("unreachable");
}

inline Domain domain_from_json(const json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "Q") return Domain::rationals();
    if (type == "Z") return Domain::integers();
    if (type == "Fq")
        return Domain::finite_field(j.at("p").get<std::int64_t>(),
                                    j.contains("e") ? j.at("e").get<int>() : 1);
    if (type == "Zmod") return Domain::integers_mod(int_from_json(j.at("m")));
    throw std::invalid_argument("unknown domain type: " + type);
}

// Parse a domain from the CLI shorthand: Q, Z, F<p>, F<p>^<e>, Zmod<m>.
inline Domain domain_from_string(const std::string& s) {
    if (s == "Q" || s == "q") return Domain::rationals();
    if (s == "Z" || s == "z") return Domain::integers();
    if (s.size() > 1 && (s[0] == 'F' || s[0] == 'f')) {
        auto caret = s.find('^');
        long long p = std::stoll(s.substr(1, caret == std::string::npos
                                                 ? std::string::npos
                                                 : caret - 1));
        int e = caret == std::string::npos ? 1 : std::stoi(s.substr(caret + 1));
        return Domain::finite_field(p, e);
    }
    if (s.rfind("Zmod", 0) == 0 || s.rfind("zmod", 0) == 0)
        return Domain::integers_mod(Int(s.substr(4)));
    throw std::invalid_argument("unknown domain: " + s);
}

// ---------------------------------------------------------------------------
// Forms: {"domain": ..., "epsilon": +/-1, "gram"/"upper": [[...]]}
// A bare matrix is accepted as a symmetric rational form.

namespace detail {

inline QMat matrix_from_json(const json& j, const Domain& d) {
    QMat m;
    if (!j.is_array()) throw std::invalid_argument("matrix must be an array of rows");
    for (const auto& row : j) {
        std::vector<Rat> r;
        for (const auto& x : row) {
            if (x.is_array()) {
                // coefficient vector over F_{p^e}: encode as integer via the
                // GF element -> not representable as a rational; only allowed
                // when the domain is an extension field
                if (!(d.kind == Domain::Kind::FiniteField && d.e > 1))
                    throw std::invalid_argument("vector entries need an extension field");
                // store the packed integer sum c_i p^i; unpacked again below
                Int packed(0), pw(1);
                for (const auto& c : x) {
                    Int ci = int_from_json(c) % d.p;
                    if (ci < 0) ci += d.p;
                    packed += ci * pw;
                    pw *= d.p;
                }
                r.push_back(Rat(packed));
            } else {
                r.push_back(rat_from_json(x));
            }
        }
        m.push_back(std::move(r));
    }
    return m;
}

inline json matrix_to_json(const QMat& m) {
    json rows = json::array();
    for (const auto& r : m) {
        json row = json::array();
        for (const auto& x : r) row.push_back(rat_to_json(x));
        rows.push_back(row);
    }
    return rows;
}

inline json gf_matrix_to_json(const GFMat& m, const GaloisField& F) {
    json rows = json::array();
    for (const auto& r : m) {
        json row = json::array();
        for (const auto& x : r) {
            if (F.degree() == 1) {
                row.push_back(x[0]);
            } else {
                json v = json::array();
                for (auto c : x) v.push_back(c);
                row.push_back(v);
            }
        }
        rows.push_back(row);
    }
    return rows;
}

// Unpack base-p packed entries into coefficient vectors for e > 1.
inline GFMat unpack_gf(const QMat& m, const GaloisField& F) {
    size_t n = m.size();
    GFMat out(n, std::vector<GaloisField::Elem>(n, F.zero()));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            Int v = m[i][j].get_num();
            std::vector<std::int64_t> coeffs;
            Int p(F.p());
            bool neg = v < 0;
            if (neg) v = -v;
            while (v > 0) {
                coeffs.push_back(Int(v % p).get_si());
                v /= p;
            }
            auto e = F.from_coeffs(coeffs);
            out[i][j] = neg ? F.neg(e) : e;
        }
    return out;
}

}  // namespace detail

inline SymBilForm sym_form_from_json(const json& j) {
    if (j.is_array())
        return make_sym_bil_form(Domain::rationals(), 1,
                                 detail::matrix_from_json(j, Domain::rationals()));
    Domain d = j.contains("domain") ? domain_from_json(j.at("domain"))
                                    : Domain::rationals();
    int eps = j.contains("epsilon") ? j.at("epsilon").get<int>() : 1;
    QMat m = detail::matrix_from_json(j.at("gram"), d);
    if (d.kind == Domain::Kind::FiniteField && d.e > 1) {
        GaloisField F(d.p, d.e);
        SymBilForm f{d, eps, {}, detail::unpack_gf(m, F)};
        return f;
    }
    return make_sym_bil_form(d, eps, std::move(m));
}

inline QuadForm quad_form_from_json(const json& j) {
    if (j.is_array())
        return make_quad_form(Domain::rationals(), 1,
                              detail::matrix_from_json(j, Domain::rationals()));
    Domain d = j.contains("domain") ? domain_from_json(j.at("domain"))
                                    : Domain::rationals();
    int eps = j.contains("epsilon") ? j.at("epsilon").get<int>() : 1;
    QMat m = detail::matrix_from_json(j.at("upper"), d);
    if (d.kind == Domain::Kind::FiniteField && d.e > 1) {
        GaloisField F(d.p, d.e);
        QuadForm q{d, eps, {}, detail::unpack_gf(m, F)};
        return q;
    }
    return make_quad_form(d, eps, std::move(m));
}

inline json to_json(const SymBilForm& f) {
    json out{{"domain", to_json(f.domain)}, {"epsilon", f.epsilon}};
    if (f.domain.is_finite_field()) {
        GaloisField F(f.domain.p, f.domain.e);
        out["gram"] = detail::gf_matrix_to_json(f.gram_f, F);
    } else {
        out["gram"] = detail::matrix_to_json(f.gram_q);
    }
    return out;
}

inline json to_json(const QuadForm& q) {
    json out{{"domain", to_json(q.domain)}, {"epsilon", q.epsilon}};
    if (q.domain.is_finite_field()) {
        GaloisField F(q.domain.p, q.domain.e);
        out["upper"] = detail::gf_matrix_to_json(q.upper_f, F);
    } else {
        out["upper"] = detail::matrix_to_json(q.upper_q);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Witt classes

inline json to_json(const FieldDesc& f) {
    switch (f.tag) {
        case FieldDesc::Tag::Q: return json{{"tag", "Q"}};
        case FieldDesc::Tag::R: return json{{"tag", "R"}};
        case FieldDesc::Tag::Qp: return json{{"tag", "Qp"}, {"p", int_to_json(f.p)}};
        case FieldDesc::Tag::Fq:
            return json{{"tag", "Fq"}, {"p", int_to_json(f.p)}, {"e", f.e}};
    }
    throw std::logic_error("unreachable");
}

namespace detail {

inline json fq_invariants(const WittFq& w, const Int& q) {
    json out{{"rank_mod_2", w.rank2}};
    if (q % 2 != 0) out["disc"] = w.disc_square ? "square" : "nonsquare";
    return out;
}

}  // namespace detail

inline json to_json(const WittClass& w) {
    json inv;
    switch (w.field.tag) {
        case FieldDesc::Tag::R: inv = json{{"signature", int_to_json(w.signature)}}; break;
        case FieldDesc::Tag::Fq: inv = detail::fq_invariants(w.fq, w.field.q()); break;
        case FieldDesc::Tag::Qp: {
            // signed discriminant of the anisotropic kernel
            long r = w.qp.rank;
            Int d = w.qp.det_class;
            if ((r * (r - 1) / 2) % 2 != 0)
                d = qp_class_mul(d, Int(-1), w.field.p);
            inv = json{{"rank_mod_2", w.qp.rank % 2},
                       {"anisotropic_rank", w.qp.rank},
                       {"disc", int_to_json(d)},
                       {"hasse", w.qp.hasse}};
            break;
        }
        case FieldDesc::Tag::Q: {
            json res = json::object();
            for (const auto& [p, fq] : w.residues)
                res[p.get_str()] = detail::fq_invariants(fq, p);
            inv = json{{"signature", int_to_json(w.signature)}, {"residues", res}};
            break;
        }
    }
    return json{{"field", to_json(w.field)}, {"invariants", inv}};
}

inline json to_json(const QDecomposition& d) {
    json res = json::object();
    for (const auto& [p, fq] : d.residues)
        res[p.get_str()] = detail::fq_invariants(fq, p);
    return json{{"signature", int_to_json(d.signature)}, {"residues", res}};
}

inline json to_json(const TorsionLinkingForm& t) {
    json orders = json::array();
    for (const auto& d : t.orders) orders.push_back(int_to_json(d));
    return json{{"group", to_json(t.group)},
                {"orders", orders},
                {"generators", detail::matrix_to_json(t.generators)},
                {"values", detail::matrix_to_json(t.values)}};
}

}  // namespace gwcalc
