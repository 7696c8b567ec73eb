#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "gwcalc/witt.hpp"
#include "oracles.hpp"

using namespace gwcalc;

namespace {

Rat random_rat(std::mt19937_64& rng, long hi) {
    std::uniform_int_distribution<long> num(-hi, hi), den(1, hi);
    long n = num(rng);
    if (n == 0) n = 1;
    return canon(Rat(n, den(rng)));
}

SymBilForm random_diag(std::mt19937_64& rng, size_t rank, long hi) {
    std::vector<Rat> e;
    for (size_t i = 0; i < rank; ++i) e.push_back(random_rat(rng, hi));
    return diag_form(e);
}

}  // namespace

TEST_CASE("hilbert symbol basics") {
    REQUIRE(hilbert_symbol(Rat(1), Rat(7), Place::prime(Int(3))) == 1);
    REQUIRE(hilbert_symbol(Rat(1), Rat(-13), Place::real()) == 1);
    REQUIRE(hilbert_symbol(Rat(-1), Rat(-1), Place::real()) == -1);
    REQUIRE(hilbert_symbol(Rat(-1), Rat(-1), Place::prime(Int(2))) == -1);
    REQUIRE(hilbert_symbol(Rat(2), Rat(3), Place::prime(Int(3))) == -1);
    REQUIRE(hilbert_symbol(Rat(5), Rat(5), Place::prime(Int(5))) == 1);
}

TEST_CASE("hilbert symbol vs brute-force solubility oracle") {
    oracles::HilbertBruteForce oracle;
    // modest grid here; the full height-30 sweep runs in the acceptance suite
    for (long a = -10; a <= 10; ++a) {
        if (a == 0) continue;
        for (long b = -10; b <= 10; ++b) {
            if (b == 0) continue;
            for (long p : {2L, 3L, 5L, 7L}) {
                INFO("a=" << a << " b=" << b << " p=" << p);
                REQUIRE(hilbert_symbol(Rat(a), Rat(b), Place::prime(Int(p))) ==
                        oracle.symbol(Rat(a), Rat(b), p));
            }
        }
    }
    // rational arguments reduce to their square classes
    REQUIRE(hilbert_symbol(Rat(3, 4), Rat(-5, 7), Place::prime(Int(7))) ==
            oracle.symbol(Rat(3, 4), Rat(-5, 7), 7));
}

TEST_CASE("hilbert symbol: symmetry, bimultiplicativity, product formula") {
    std::mt19937_64 rng(424242);
    for (int it = 0; it < 100; ++it) {
        Rat a = random_rat(rng, 40), b = random_rat(rng, 40), c = random_rat(rng, 40);
        std::set<Int> support{Int(2)};
        for (const Rat* x : {&a, &b, &c}) {
            for (auto& [p, e] : factorize(Int(x->get_num()))) support.insert(p);
            for (auto& [p, e] : factorize(Int(x->get_den()))) support.insert(p);
        }
        int prod = hilbert_symbol(a, b, Place::real());
        for (const auto& p : support) {
            Place pl = Place::prime(p);
            REQUIRE(hilbert_symbol(a, b, pl) == hilbert_symbol(b, a, pl));
            REQUIRE(hilbert_symbol(Rat(a * c * c), b, pl) == hilbert_symbol(a, b, pl));
            REQUIRE(hilbert_symbol(Rat(a * b), c, pl) ==
                    hilbert_symbol(a, c, pl) * hilbert_symbol(b, c, pl));
            prod *= hilbert_symbol(a, b, pl);
        }
        REQUIRE(prod == 1);
    }
}

TEST_CASE("hasse invariant") {
    REQUIRE(hasse_invariant({Rat(1), Rat(1)}, Place::prime(Int(2))) == 1);
    REQUIRE(hasse_invariant({Rat(-1), Rat(-1)}, Place::prime(Int(2))) == -1);
    REQUIRE(hasse_invariant({Rat(7)}, Place::prime(Int(2))) == 1);
    REQUIRE(hasse_invariant({Rat(7)}, Place::real()) == 1);
}

TEST_CASE("witt classes over finite fields") {
    // <1,1> over F_2 is zero; <1> generates W(F_2) = Z/2
    auto f2 = FieldDesc::Fq(Int(2));
    auto two = make_sym_bil_form(Domain::finite_field(2), 1,
                                 {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}});
    REQUIRE(witt_is_zero(witt_class(two, f2)));
    auto one = make_sym_bil_form(Domain::finite_field(2), 1, {{Rat(1)}});
    REQUIRE(!witt_is_zero(witt_class(one, f2)));

    // hyperbolic is zero over any field
    for (auto p : {2L, 3L, 5L}) {
        auto h = standard_bilinear(StandardBilinear::HyperbolicSym,
                                   Domain::finite_field(p));
        REQUIRE(witt_is_zero(witt_class(h, FieldDesc::Fq(Int(p)))));
    }

    // <1,1> over F_3 is the order-2 element of W(F_3) = Z/4
    auto f3 = FieldDesc::Fq(Int(3));
    auto d11 = make_sym_bil_form(Domain::finite_field(3), 1,
                                 {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}});
    auto w = witt_class(d11, f3);
    REQUIRE(!witt_is_zero(w));
    REQUIRE(witt_is_zero(witt_add(w, w)));
    auto g = witt_class(make_sym_bil_form(Domain::finite_field(3), 1, {{Rat(1)}}), f3);
    REQUIRE(witt_add(g, g) == w);  // 2<1> = <1,1>
}

TEST_CASE("brute-force classification of W(F_3) finds 4 classes") {
    auto f3 = FieldDesc::Fq(Int(3));
    std::set<std::pair<int, bool>> classes;
    std::vector<std::vector<Rat>> layer = {{}};
    for (int r = 1; r <= 4; ++r) {
        std::vector<std::vector<Rat>> next;
        for (auto& base : layer)
            for (long c : {1L, 2L}) {
                auto e = base;
                e.push_back(Rat(c));
                next.push_back(e);
                auto w = witt_class(diag_form(e, Domain::finite_field(3)), f3);
                classes.insert({w.fq.rank2, w.fq.disc_square});
            }
        layer = next;
    }
    REQUIRE(classes.size() == 4);  // the zero class is reached by <1,2>
}

TEST_CASE("witt group structures") {
    REQUIRE(witt_group_structure(FieldDesc::R()) == FgAbelianGroup::free(1));
    REQUIRE(witt_group_structure(FieldDesc::Fq(Int(2))) ==
            FgAbelianGroup::cyclic(Int(2)));
    REQUIRE(witt_group_structure(FieldDesc::Fq(Int(5))) ==
            FgAbelianGroup::from_factors(0, {Int(2), Int(2)}));
    REQUIRE(witt_group_structure(FieldDesc::Fq(Int(3))) ==
            FgAbelianGroup::cyclic(Int(4)));
    REQUIRE(witt_group_structure(FieldDesc::Fq(Int(3), 2)) ==  // q = 9 = 1 mod 4
            FgAbelianGroup::from_factors(0, {Int(2), Int(2)}));
    REQUIRE(witt_group_structure(FieldDesc::Qp(Int(2))) ==
            FgAbelianGroup::from_factors(0, {Int(2), Int(2), Int(8)}));
    REQUIRE(*group_order(witt_group_structure(FieldDesc::Qp(Int(3)))) == 16);
    REQUIRE_THROWS_AS(witt_group_structure(FieldDesc::Q()), std::domain_error);
}

TEST_CASE("second residue boundary") {
    auto r = second_residue({Rat(2)}, Int(2));
    REQUIRE(r.fq.rank2 == 1);  // generator of W(F_2)

    auto s = second_residue({Rat(6)}, Int(3));
    REQUIRE(s.fq.rank2 == 1);
    REQUIRE(!s.fq.disc_square);  // <2> in W(F_3)

    REQUIRE(witt_is_zero(second_residue({Rat(3)}, Int(5))));

    // additivity
    std::mt19937_64 rng(17);
    for (int it = 0; it < 40; ++it) {
        auto f = random_diag(rng, 1 + rng() % 4, 20);
        auto g = random_diag(rng, 1 + rng() % 4, 20);
        for (long p : {2L, 3L, 5L, 7L}) {
            auto both = second_residue(direct_sum(f, g), Int(p));
            auto sum = witt_add(second_residue(f, Int(p)), second_residue(g, Int(p)));
            REQUIRE(both == sum);
        }
    }
}

TEST_CASE("unit-entry forms have trivial residues; <pu> realizes generators") {
    std::mt19937_64 rng(23);
    for (int it = 0; it < 30; ++it) {
        std::vector<Rat> e;
        for (size_t i = 0; i < 1 + rng() % 4; ++i) e.push_back(Rat(rng() % 2 ? 1 : -1));
        for (long p : {2L, 3L, 5L})
            REQUIRE(witt_is_zero(second_residue(e, Int(p))));
    }
    // surjectivity: the rank-1 classes of W(F_p) are all hit by <p*u>
    for (long p : {3L, 5L, 7L}) {
        std::set<std::pair<int, bool>> hit;
        for (long u = 1; u < p; ++u) {
            auto r = second_residue({Rat(p * u)}, Int(p));
            hit.insert({r.fq.rank2, r.fq.disc_square});
        }
        REQUIRE(hit.size() == 2);
    }
}

TEST_CASE("witt_q_decompose") {
    auto e8 = standard_bilinear(StandardBilinear::E8, Domain::rationals());
    auto d = witt_q_decompose(e8);
    REQUIRE(d.signature == 8);
    REQUIRE(d.residues.empty());

    auto hyp = witt_q_decompose({Rat(2), Rat(-2)});
    REQUIRE(hyp.signature == 0);
    REQUIRE(hyp.residues.empty());

    auto f = witt_q_decompose({Rat(15)});
    REQUIRE(f.signature == 1);
    REQUIRE(f.residues.size() == 2);
    // 15 = 3*5: residue at 3 is <5 mod 3> = <2>, nonsquare
    REQUIRE(f.residues.at(Int(3)).rank2 == 1);
    REQUIRE(!f.residues.at(Int(3)).disc_square);
    // residue at 5 is <3 mod 5>, nonsquare (3 is not a QR mod 5)
    REQUIRE(f.residues.at(Int(5)).rank2 == 1);
    REQUIRE(!f.residues.at(Int(5)).disc_square);
}

TEST_CASE("witt additivity over each field family") {
    std::mt19937_64 rng(5150);
    for (int it = 0; it < 30; ++it) {
        auto f = random_diag(rng, 1 + rng() % 4, 15);
        auto g = random_diag(rng, 1 + rng() % 4, 15);
        auto fg = direct_sum(f, g);
        for (auto field : {FieldDesc::Q(), FieldDesc::R(), FieldDesc::Qp(Int(2)),
                           FieldDesc::Qp(Int(5))}) {
            auto sum = witt_add(witt_class(f, field), witt_class(g, field));
            REQUIRE(witt_class(fg, field) == sum);
        }
    }
    // finite fields, entries kept unit
    for (int it = 0; it < 30; ++it) {
        for (long p : {3L, 5L, 7L}) {
            std::vector<Rat> ea, eb;
            for (size_t i = 0; i < 1 + rng() % 3; ++i)
                ea.push_back(Rat(1 + static_cast<long>(rng() % (p - 1))));
            for (size_t i = 0; i < 1 + rng() % 3; ++i)
                eb.push_back(Rat(1 + static_cast<long>(rng() % (p - 1))));
            auto f = diag_form(ea, Domain::finite_field(p));
            auto g = diag_form(eb, Domain::finite_field(p));
            auto field = FieldDesc::Fq(Int(p));
            REQUIRE(witt_class(direct_sum(f, g), field) ==
                    witt_add(witt_class(f, field), witt_class(g, field)));
        }
    }
}

TEST_CASE("metabolic vanishing: lagrangian implies zero witt class") {
    std::mt19937_64 rng(808);
    int found = 0;
    for (int it = 0; it < 60 && found < 12; ++it) {
        long p = std::vector<long>{3, 5, 7}[rng() % 3];
        size_t n = 2 * (1 + rng() % 2);
        std::vector<Rat> e;
        for (size_t i = 0; i < n; ++i)
            e.push_back(Rat(1 + static_cast<long>(rng() % (p - 1))));
        auto f = diag_form(e, Domain::finite_field(p));
        auto r = find_strict_lagrangian(f);
        if (r.status != LagrangianStatus::Found) continue;
        ++found;
        REQUIRE(witt_is_zero(witt_class(f, FieldDesc::Fq(Int(p)))));
    }
    REQUIRE(found > 0);
}

TEST_CASE("W(Q_2) enumeration and the 2-adic integral kernel") {
    auto en = enumerate_witt_qp(Int(2));
    REQUIRE(en.classes.size() == 32);
    REQUIRE(en.structure == FgAbelianGroup::from_factors(0, {Int(2), Int(2), Int(8)}));

    auto k2 = integral_kernel_order(Int(2));
    REQUIRE(k2 == FgAbelianGroup::from_factors(0, {Int(2), Int(8)}));
    REQUIRE(*group_order(k2) == 16);
}

TEST_CASE("odd-p enumeration agrees with the closed form") {
    for (long p : {3L, 5L}) {
        auto en = enumerate_witt_qp(Int(p));
        REQUIRE(en.classes.size() == 16);
        REQUIRE(en.structure == witt_group_structure(FieldDesc::Qp(Int(p))));
        auto k = integral_kernel_order(Int(p));
        REQUIRE(*group_order(k) == 4);  // kernel index = |W(F_p)| = 4
        REQUIRE(*group_order(k) *
                    *group_order(witt_group_structure(FieldDesc::Fq(Int(p)))) ==
                *group_order(witt_group_structure(FieldDesc::Qp(Int(p)))));
    }
}

TEST_CASE("the splitting element <-1,2> of L_0^s(Q_2) has order 2") {
    auto field = FieldDesc::Qp(Int(2));
    auto f = diag_form({Rat(-1), Rat(2)});
    auto w = witt_class(f, field);
    REQUIRE(!witt_is_zero(w));
    REQUIRE(witt_is_zero(witt_add(w, w)));
}
