#pragma once

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gwcalc/bernoulli.hpp"
#include "gwcalc/json_io.hpp"
#include "gwcalc/lattice.hpp"
#include "gwcalc/tables.hpp"
#include "gwcalc/witt.hpp"

namespace gwcalc::cli {

namespace detail {

inline json load_json_arg(const std::string& arg) {
    std::string text = arg;
    if (!arg.empty() && arg[0] != '[' && arg[0] != '{') {
        std::ifstream in(arg);
        if (!in) throw std::runtime_error("cannot open " + arg);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    return json::parse(text);
}

inline std::string normalize(std::string s) {
    for (auto& c : s)
        if (c == '-') c = '_';
    return s;
}

inline std::vector<Rat> parse_entries(const std::string& s) {
    std::vector<Rat> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_rational(tok));
    return out;
}

inline TableFormat parse_format(const std::string& s) {
    if (s == "markdown") return TableFormat::Markdown;
    if (s == "json") return TableFormat::Json;
    if (s == "csv") return TableFormat::Csv;
    throw CLI::ValidationError("--format", "unknown format: " + s);
}

inline FieldDesc parse_field(const std::string& tag, const std::string& p, int e) {
    std::string t = normalize(tag);
    if (t == "q" || t == "Q") return FieldDesc::Q();
    if (t == "r" || t == "R") return FieldDesc::R();
    if (t == "qp" || t == "Qp") {
        if (p.empty()) throw CLI::ValidationError("--p", "Qp needs a prime");
        return FieldDesc::Qp(Int(p));
    }
    if (t == "fq" || t == "Fq") {
        if (p.empty()) throw CLI::ValidationError("--p", "Fq needs a prime");
        return FieldDesc::Fq(Int(p), e);
    }
    throw CLI::ValidationError("--field", "unknown field: " + tag);
}

inline int run_selftest(std::ostream& out) {
    int failures = 0;
    auto report = [&](const std::string& name, bool ok, const std::string& note = "") {
        out << (ok ? "PASS " : "FAIL ") << name;
        if (!note.empty()) out << " (" << note << ")";
        out << "\n";
        if (!ok) ++failures;
    };

    {
        BernoulliTable table;
        auto rep = von_staudt_checks(200, table);
        report("von-staudt n<=200", rep.ok,
               rep.ok ? "" : "first failure at n=" + std::to_string(rep.first_failure));
    }
    {
        std::mt19937_64 rng(20240817);
        bool ok = true;
        std::string note;
        int done = 0;
        while (done < 50 && ok) {
            size_t n = 1 + rng() % 4;
            std::vector<Rat> e;
            for (size_t i = 0; i < n; ++i) {
                long num = 2 * static_cast<long>(rng() % 10) + 1;
                long den = 2 * static_cast<long>(rng() % 10) + 1;
                if (rng() % 2) num = -num;
                e.push_back(canon(Rat(num, den)));
            }
            auto lat = maximal_integral_sublattice(diag_form(e));
            auto dev = devissage_class(torsion_linking_form(lat));
            auto res = witt_q_decompose(e).residues;
            if (dev.size() != res.size()) ok = false;
            for (const auto& [p, w] : res)
                if (!dev.count(p) || !(dev.at(p).fq == w)) ok = false;
            if (!ok) note = "mismatch on sample " + std::to_string(done);
            ++done;
        }
        report("dual-path devissage 50 forms", ok, note);
    }
    {
        std::mt19937_64 rng(31337);
        bool ok = true;
        for (int it = 0; it < 100 && ok; ++it) {
            long a = static_cast<long>(rng() % 79) - 39;
            long b = static_cast<long>(rng() % 79) - 39;
            if (a == 0) a = 1;
            if (b == 0) b = 1;
            int prod = hilbert_symbol(Rat(a), Rat(b), Place::real());
            std::set<Int> support{Int(2)};
            for (auto& [p, e] : factorize(Int(a))) support.insert(p);
            for (auto& [p, e] : factorize(Int(b))) support.insert(p);
            for (const auto& p : support)
                prod *= hilbert_symbol(Rat(a), Rat(b), Place::prime(p));
            if (prod != 1) ok = false;
        }
        report("hilbert product formula 100 pairs", ok);
    }
    out << (failures == 0 ? "PASS" : "FAIL") << " selftest: " << (3 - failures)
        << "/3 suites\n";
    return failures == 0 ? 0 : 1;
}

struct FormInput {
    std::string standard;
    std::string domain = "Q";
    std::string entries;
    std::string form_json;
    std::string quad_json;
};

inline bool is_quad_standard(const std::string& name) {
    return name == "hyp_quad_arf0" || name == "hyp_quad_arf1" || name == "e8_quad" ||
           name == "diag_quad";
}

inline SymBilForm build_sym(const FormInput& in) {
    if (!in.form_json.empty()) return sym_form_from_json(load_json_arg(in.form_json));
    Domain d = domain_from_string(in.domain);
    std::string name = normalize(in.standard);
    auto entries = parse_entries(in.entries);
    if (name == "hyperbolic_sym")
        return standard_bilinear(StandardBilinear::HyperbolicSym, d);
    if (name == "hyperbolic_skew")
        return standard_bilinear(StandardBilinear::HyperbolicSkew, d);
    if (name == "e8") return standard_bilinear(StandardBilinear::E8, d);
    if (name == "diag") return standard_bilinear(StandardBilinear::Diag, d, entries);
    if (name == "one") return standard_bilinear(StandardBilinear::One, d, entries);
    throw CLI::ValidationError("--standard", "unknown bilinear form: " + in.standard);
}

inline QuadForm build_quad(const FormInput& in) {
    if (!in.quad_json.empty()) return quad_form_from_json(load_json_arg(in.quad_json));
    Domain d = domain_from_string(in.domain);
    std::string name = normalize(in.standard);
    auto entries = parse_entries(in.entries);
    if (name == "hyp_quad_arf0") return standard_quadratic(StandardQuadratic::HypArf0, d);
    if (name == "hyp_quad_arf1") return standard_quadratic(StandardQuadratic::HypArf1, d);
    if (name == "e8_quad") return standard_quadratic(StandardQuadratic::E8, d);
    if (name == "diag_quad") return standard_quadratic(StandardQuadratic::Diag, d, entries);
    throw CLI::ValidationError("--standard", "unknown quadratic form: " + in.standard);
}

inline json form_invariants(const SymBilForm& f) {
    json out{{"rank", f.rank()}, {"epsilon", f.epsilon},
             {"domain", to_json(f.domain)}};
    if (!f.domain.is_finite_field()) {
        bool integral = true;
        for (const auto& row : f.gram_q)
            for (const auto& x : row)
                if (x.get_den() != 1) integral = false;
        Rat d = matq::det(f.gram_q);
        out["det"] = rat_to_json(d);
        if (f.epsilon == 1 && d != 0) {
            out["signature"] = int_to_json(signature(f));
            out["discriminant"] = rat_to_json(discriminant(f).value_q);
        }
        if (integral && f.domain.kind != Domain::Kind::IntegersMod)
            out["unimodular"] = is_unimodular(f);
    } else {
        GaloisField F(f.domain.p, f.domain.e);
        auto d = field_det(F, f.gram_f);
        out["det"] = F.to_string(d);
        if (f.epsilon == 1 && !F.is_zero(d)) {
            auto disc = discriminant(f);
            out["discriminant"] =
                F.eq(disc.value_f, F.one()) ? "square" : "nonsquare";
        }
    }
    return out;
}

}  // namespace detail

/// Dispatch a full command line (without argv[0]). Exit codes: 0 success,
/// 1 domain error, 2 usage error.
inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
    CLI::App app{"exact Witt, L- and Grothendieck-Witt group calculator"};
    app.require_subcommand(1);

    // ---- form
    detail::FormInput fin;
    bool act_diag = false, act_arf = false, act_lagr = false, act_json = false,
         act_sympl = false;
    long bound = 5;
    auto* form = app.add_subcommand("form", "construct and inspect forms");
    form->add_option("--standard", fin.standard,
                     "hyperbolic-sym|hyperbolic-skew|e8|diag|one|"
                     "hyp-quad-arf0|hyp-quad-arf1|e8-quad|diag-quad");
    form->add_option("--domain", fin.domain, "Q|Z|F<p>[^e]|Zmod<m>");
    form->add_option("--entries", fin.entries, "comma-separated diagonal entries");
    form->add_option("--form", fin.form_json, "bilinear form as JSON or a file");
    form->add_option("--quad", fin.quad_json, "quadratic form as JSON or a file");
    form->add_flag("--diagonalize", act_diag, "print diagonal entries and basis");
    form->add_flag("--symplectic-basis", act_sympl, "print a symplectic basis");
    form->add_flag("--arf", act_arf, "print the Arf invariant");
    form->add_flag("--lagrangian", act_lagr, "search for a strict Lagrangian");
    form->add_option("--bound", bound, "box bound for the integral search")
        ->default_val(5);
    form->add_flag("--json", act_json, "print the form as JSON");

    // ---- witt
    auto* witt = app.add_subcommand("witt", "Witt-group calculus");
    witt->require_subcommand(1);
    std::string w_form, w_field = "Q", w_p;
    int w_e = 1;
    auto* wclass = witt->add_subcommand("class", "complete Witt invariants");
    wclass->add_option("--form", w_form, "form (JSON, file, or bare matrix)")
        ->required();
    wclass->add_option("--field", w_field, "Q|R|Qp|Fq");
    wclass->add_option("--p", w_p, "prime for Qp/Fq");
    wclass->add_option("--e", w_e, "extension degree for Fq");
    auto* wres = witt->add_subcommand("residue", "second-residue boundary at p");
    std::string r_form, r_p;
    wres->add_option("--form", r_form)->required();
    wres->add_option("--p", r_p)->required();
    auto* wdec = witt->add_subcommand("decompose", "signature and all residues");
    std::string d_form;
    wdec->add_option("--form", d_form)->required();
    auto* wstr = witt->add_subcommand("structure", "Witt group structure");
    std::string s_field, s_p;
    int s_e = 1;
    bool s_enum = false;
    wstr->add_option("--field", s_field, "R|Fq|Qp")->required();
    wstr->add_option("--p", s_p);
    wstr->add_option("--e", s_e);
    wstr->add_flag("--enumerate", s_enum, "recompute W(Q_p) by enumeration");

    // ---- boundary
    auto* boundary = app.add_subcommand("boundary", "lattice boundary map");
    auto* blat = boundary->add_subcommand("lattice", "torsion form and residues");
    std::string b_form, b_basis;
    blat->add_option("--form", b_form, "ambient rational form")->required();
    blat->add_option("--basis", b_basis, "lattice basis (columns)");

    // ---- bern
    auto* bern = app.add_subcommand("bern", "Bernoulli table as CSV rows");
    long bern_max = 0;
    bern->add_option("--max", bern_max, "largest even index 2n")->required();

    // ---- ktable
    auto* ktable = app.add_subcommand("ktable", "K-groups of Z");
    long kt_max = 0;
    bool kt_vandiver = false;
    ktable->add_option("--max", kt_max)->required();
    ktable->add_flag("--vandiver", kt_vandiver, "assume the Vandiver conjecture");

    // ---- lgroups
    auto* lgr = app.add_subcommand("lgroups", "L-groups of the builtin rings");
    std::string lg_ring = "z", lg_flavor = "sym", lg_format = "markdown";
    long lg_from = 0, lg_to = 3;
    lgr->add_option("--ring", lg_ring, "z|z-half|eisenstein");
    lgr->add_option("--flavor", lg_flavor, "sym|skew-sym|quad|skew-quad|genuine-sym");
    lgr->add_option("--from", lg_from);
    lgr->add_option("--to", lg_to);
    lgr->add_option("--format", lg_format, "markdown|json|csv");

    // ---- gwz
    auto* gwz = app.add_subcommand("gwz", "Grothendieck-Witt groups of Z");
    std::vector<std::string> gw_flavors;
    long gw_max = 23;
    bool gw_vandiver = false;
    std::string gw_format = "markdown";
    gwz->add_option("--flavor", gw_flavors,
                    "sym|skew-sym|genuine-quad|skew-genuine-quad (repeatable)");
    gwz->add_option("--max", gw_max);
    gwz->add_flag("--vandiver", gw_vandiver);
    gwz->add_option("--format", gw_format, "markdown|json|csv");

    // ---- selftest
    auto* selftest = app.add_subcommand("selftest", "von Staudt and dual-path suites");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (form->parsed()) {
            bool quad_input = !fin.quad_json.empty() ||
                              detail::is_quad_standard(detail::normalize(fin.standard));
            if (quad_input) {
                QuadForm q = detail::build_quad(fin);
                if (act_json) out << to_json(q).dump() << "\n";
                if (act_arf) out << json{{"arf", arf_invariant(q)}}.dump() << "\n";
                if (act_lagr) {
                    auto r = find_strict_lagrangian(q, bound);
                    json res{{"status", r.status == LagrangianStatus::Found ? "found"
                              : r.status == LagrangianStatus::DoesNotExist
                                  ? "does not exist"
                                  : "not found within bound"}};
                    if (r.status == LagrangianStatus::Found && !r.basis.empty())
                        res["basis"] = detail::matrix_to_json(r.basis);
                    out << res.dump() << "\n";
                }
                if (!act_json && !act_arf && !act_lagr) {
                    json inv = detail::form_invariants(polarization(q));
                    inv["kind"] = "quadratic";
                    out << inv.dump() << "\n";
                }
                return 0;
            }
            SymBilForm f = detail::build_sym(fin);
            if (act_json) out << to_json(f).dump() << "\n";
            if (act_diag) {
                auto d = diagonalize_rational(f);
                json entries = json::array();
                for (const auto& e : d.entries) entries.push_back(rat_to_json(e));
                out << json{{"entries", entries},
                            {"change", detail::matrix_to_json(d.change)}}
                           .dump()
                    << "\n";
            }
            if (act_sympl) {
                auto b = symplectic_basis(f);
                out << json{{"basis", detail::matrix_to_json(b)}}.dump() << "\n";
            }
            if (act_lagr) {
                auto r = find_strict_lagrangian(f, nullptr, bound);
                json res{{"status", r.status == LagrangianStatus::Found ? "found"
                          : r.status == LagrangianStatus::DoesNotExist
                              ? "does not exist"
                              : "not found within bound"}};
                if (r.status == LagrangianStatus::Found && !r.basis.empty())
                    res["basis"] = detail::matrix_to_json(r.basis);
                out << res.dump() << "\n";
            }
            if (!act_json && !act_diag && !act_sympl && !act_lagr)
                out << detail::form_invariants(f).dump() << "\n";
            return 0;
        }

        if (witt->parsed()) {
            if (wclass->parsed()) {
                auto f = sym_form_from_json(detail::load_json_arg(w_form));
                auto field = detail::parse_field(w_field, w_p, w_e);
                out << to_json(witt_class(f, field)).dump() << "\n";
            } else if (wres->parsed()) {
                auto f = sym_form_from_json(detail::load_json_arg(r_form));
                out << to_json(second_residue(f, Int(r_p))).dump() << "\n";
            } else if (wdec->parsed()) {
                auto f = sym_form_from_json(detail::load_json_arg(d_form));
                out << to_json(witt_q_decompose(f)).dump() << "\n";
            } else if (wstr->parsed()) {
                auto field = detail::parse_field(s_field, s_p, s_e);
                if (s_enum && field.tag == FieldDesc::Tag::Qp) {
                    auto en = enumerate_witt_qp(field.p);
                    out << json{{"elements", en.classes.size()},
                                {"group", to_json(en.structure)},
                                {"show", show(en.structure)}}
                               .dump()
                        << "\n";
                } else {
                    auto g = witt_group_structure(field);
                    out << json{{"group", to_json(g)}, {"show", show(g)}}.dump()
                        << "\n";
                }
            }
            return 0;
        }

        if (boundary->parsed()) {
            auto f = sym_form_from_json(detail::load_json_arg(b_form));
            QMat basis;
            if (b_basis.empty()) {
                basis = matq::identity(f.rank());
            } else {
                basis = detail::matrix_from_json(detail::load_json_arg(b_basis),
                                                 Domain::rationals());
            }
            auto lat = make_lattice(f, basis);
            auto t = torsion_linking_form(lat);
            auto dev = devissage_class(t);
            json res = json::object();
            for (const auto& [p, w] : dev) res[p.get_str()] = to_json(w);
            out << json{{"torsion", to_json(t)}, {"residues", res}}.dump() << "\n";
            return 0;
        }

        if (bern->parsed()) {
            BernoulliTable table;
            const char* cache = std::getenv("GWCALC_BERNOULLI_CACHE");
            if (cache) table.load_csv(cache);
            for (long m = 2; m <= bern_max; m += 2) {
                Rat b = table.bernoulli(m);
                out << m << "," << b.get_str() << ","
                    << table.c_numerator(m / 2).get_str() << ","
                    << table.w_denominator(m).get_str() << "\n";
            }
            if (cache) table.save_csv(cache);
            return 0;
        }

        if (ktable->parsed()) {
            BernoulliTable table;
            out << "n,K_n(Z),conditional\n";
            for (long n = 0; n <= kt_max; ++n) {
                auto g = k_group_z(n, kt_vandiver, table);
                out << n << "," << show(g) << "," << (g.conditional ? 1 : 0) << "\n";
            }
            return 0;
        }

        if (lgr->parsed()) {
            DedekindDescriptor ring;
            std::string rn = detail::normalize(lg_ring);
            if (rn == "z")
                ring = ring_z();
            else if (rn == "z_half")
                ring = ring_z_half();
            else if (rn == "eisenstein")
                ring = ring_eisenstein();
            else
                throw CLI::ValidationError("--ring", "unknown ring: " + lg_ring);
            std::string fl = detail::normalize(lg_flavor);
            LFlavor flavor;
            if (fl == "sym") flavor = LFlavor::Sym;
            else if (fl == "skew_sym") flavor = LFlavor::SkewSym;
            else if (fl == "quad") flavor = LFlavor::Quad;
            else if (fl == "skew_quad") flavor = LFlavor::SkewQuad;
            else if (fl == "genuine_sym") flavor = LFlavor::GenuineSym;
            else
                throw CLI::ValidationError("--flavor", "unknown flavor: " + lg_flavor);
            if (lg_to < lg_from) throw CLI::ValidationError("--to", "empty range");
            std::vector<FgAbelianGroup> col;
            for (long n = lg_from; n <= lg_to; ++n)
                col.push_back(l_group(ring, flavor, n));
            out << render_table({l_flavor_name(flavor) + "(" + ring.name + ")"}, {col},
                                lg_from, detail::parse_format(lg_format));
            if (detail::parse_format(lg_format) == TableFormat::Json) out << "\n";
            return 0;
        }

        if (gwz->parsed()) {
            if (gw_flavors.empty()) gw_flavors = {"sym"};
            BernoulliTable table;
            std::vector<std::string> headers;
            std::vector<std::vector<FgAbelianGroup>> cols;
            for (const auto& fs : gw_flavors) {
                std::string fl = detail::normalize(fs);
                GwFlavor flavor;
                if (fl == "sym") flavor = GwFlavor::Sym;
                else if (fl == "skew_sym") flavor = GwFlavor::SkewSym;
                else if (fl == "genuine_quad") flavor = GwFlavor::GenuineQuad;
                else if (fl == "skew_genuine_quad") flavor = GwFlavor::SkewGenuineQuad;
                else
                    throw CLI::ValidationError("--flavor", "unknown flavor: " + fs);
                headers.push_back(gw_flavor_name(flavor) + "(ℤ)");
                std::vector<FgAbelianGroup> col;
                for (long n = 0; n <= gw_max; ++n)
                    col.push_back(gw_group_z(flavor, n, gw_vandiver, table));
                cols.push_back(std::move(col));
            }
            out << render_table(headers, cols, 0, detail::parse_format(gw_format));
            if (detail::parse_format(gw_format) == TableFormat::Json) out << "\n";
            return 0;
        }

        if (selftest->parsed()) return detail::run_selftest(out);
    } catch (const CLI::ValidationError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace gwcalc::cli
