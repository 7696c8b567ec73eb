#include <catch2/catch_amalgamated.hpp>

#include "gwcalc/tables.hpp"
#include "oracles.hpp"

using namespace gwcalc;

namespace {

FgAbelianGroup Z() { return FgAbelianGroup::free(1); }
FgAbelianGroup Zn(long n) { return FgAbelianGroup::cyclic(Int(n)); }
FgAbelianGroup zero() { return FgAbelianGroup::trivial(); }

}  // namespace

TEST_CASE("L groups of Z") {
    auto z = ring_z();
    std::vector<FgAbelianGroup> sym = {Z(), Zn(2), zero(), zero()};
    std::vector<FgAbelianGroup> quad = {Z(), zero(), Zn(2), zero()};
    for (long n = -8; n <= 11; ++n) {
        REQUIRE(l_group(z, LFlavor::Sym, n) == sym[((n % 4) + 4) % 4]);
        REQUIRE(l_group(z, LFlavor::Quad, n) == quad[((n % 4) + 4) % 4]);
    }
}

TEST_CASE("L groups of the Eisenstein integers") {
    auto r = ring_eisenstein();
    std::vector<FgAbelianGroup> sym = {Zn(4), Zn(2), zero(), zero()};
    std::vector<FgAbelianGroup> quad = {Zn(2), zero(), Zn(2),
                                        FgAbelianGroup::from_factors(0, {Int(2), Int(4)})};
    for (long n = 0; n <= 7; ++n) {
        REQUIRE(l_group(r, LFlavor::Sym, n) == sym[n % 4]);
        REQUIRE(l_group(r, LFlavor::Quad, n) == quad[n % 4]);
        REQUIRE(!l_group(r, LFlavor::Quad, n).conditional);
    }
}

TEST_CASE("L groups of Z[1/2] and Z[1/l]") {
    auto r = ring_z_half();
    // no dyadic primes: L^s_1 = 0, L^q_2 = 0
    REQUIRE(l_group(r, LFlavor::Sym, 1) == zero());
    REQUIRE(l_group(r, LFlavor::Quad, 2) == zero());
    REQUIRE(l_group(r, LFlavor::Sym, 0) == FgAbelianGroup::from_factors(1, {Int(2)}));
    REQUIRE(l_group(r, LFlavor::Quad, 3) == zero());

    auto r3 = ring_z_inverted(3);
    REQUIRE(l_group(r3, LFlavor::Sym, 0) == FgAbelianGroup::from_factors(1, {Int(4)}));
    REQUIRE(l_group(r3, LFlavor::Sym, 1) == Zn(2));
    REQUIRE(l_group(r3, LFlavor::Sym, 3) == zero());
    // quadratic data is not shipped for Z[1/l]
    REQUIRE_THROWS_AS(l_group(r3, LFlavor::Quad, 0), std::domain_error);
    auto r5 = ring_z_inverted(5);
    REQUIRE(l_group(r5, LFlavor::Sym, 0) ==
            FgAbelianGroup::from_factors(1, {Int(2), Int(2)}));
}

TEST_CASE("periodicity and skew shift") {
    for (auto ring : {ring_z(), ring_eisenstein(), ring_z_half()}) {
        for (long n = -6; n <= 6; ++n) {
            for (auto fl : {LFlavor::Sym, LFlavor::Quad}) {
                REQUIRE(l_group(ring, fl, n) == l_group(ring, fl, n + 4));
            }
            REQUIRE(l_group(ring, LFlavor::SkewSym, n) ==
                    l_group(ring, LFlavor::Sym, n - 2));
            REQUIRE(l_group(ring, LFlavor::SkewQuad, n) ==
                    l_group(ring, LFlavor::Quad, n - 2));
        }
    }
}

TEST_CASE("odd symmetric vanishing for number rings") {
    for (auto ring : {ring_z(), ring_eisenstein(), ring_z_half(), ring_z_inverted(7)}) {
        REQUIRE(l_group(ring, LFlavor::Sym, 2) == zero());
        // n = 3 (4) is Pic/2, trivial for all shipped rings
        REQUIRE(l_group(ring, LFlavor::Sym, 3) == zero());
    }
}

TEST_CASE("genuine symmetric L groups of Z") {
    REQUIRE(l_genuine_symmetric_z(0) == Z());
    REQUIRE(l_genuine_symmetric_z(4) == Z());
    REQUIRE(l_genuine_symmetric_z(1) == Zn(2));
    REQUIRE(l_genuine_symmetric_z(-1) == zero());
    REQUIRE(l_genuine_symmetric_z(-2) == zero());
    REQUIRE(l_genuine_symmetric_z(-3) == zero());
    REQUIRE(l_genuine_symmetric_z(-4) == Z());
    REQUIRE(l_genuine_symmetric_z(-6) == Zn(2));  // = L^q_2(Z)
    REQUIRE(l_group(ring_z(), LFlavor::GenuineSym, -6) == Zn(2));
    REQUIRE_THROWS_AS(l_group(ring_eisenstein(), LFlavor::GenuineSym, 0),
                      std::domain_error);
}

TEST_CASE("normal cofibre") {
    REQUIRE(normal_cofibre(1, CofibreFlavor::Orthogonal) == Zn(2));
    REQUIRE(normal_cofibre(0, CofibreFlavor::Orthogonal) == Zn(8));
    REQUIRE(normal_cofibre(-1, CofibreFlavor::Orthogonal) == Zn(2));
    REQUIRE(normal_cofibre(5, CofibreFlavor::Orthogonal) == zero());
    REQUIRE(normal_cofibre(2, CofibreFlavor::Symplectic) == Zn(8));
    REQUIRE(normal_cofibre(3, CofibreFlavor::Symplectic) == Zn(2));
    REQUIRE(normal_cofibre(0, CofibreFlavor::Symplectic) == zero());
}

TEST_CASE("GW groups of Z: low-degree table spot checks") {
    BernoulliTable t;
    REQUIRE(gw_group_z(GwFlavor::Sym, 0, false, t) == FgAbelianGroup::free(2));
    REQUIRE(gw_group_z(GwFlavor::Sym, 1, false, t) ==
            FgAbelianGroup::from_factors(0, {Int(2), Int(2), Int(2)}));
    REQUIRE(gw_group_z(GwFlavor::Sym, 2, false, t) ==
            FgAbelianGroup::from_factors(0, {Int(2), Int(2)}));
    REQUIRE(gw_group_z(GwFlavor::Sym, 3, false, t) == Zn(24));
    REQUIRE(gw_group_z(GwFlavor::Sym, 7, false, t) == Zn(240));
    REQUIRE(gw_group_z(GwFlavor::Sym, 11, false, t) == Zn(504));
    REQUIRE(gw_group_z(GwFlavor::Sym, 15, false, t) == Zn(480));
    REQUIRE(gw_group_z(GwFlavor::Sym, 19, false, t) == Zn(264));
    REQUIRE(gw_group_z(GwFlavor::Sym, 22, false, t) == Zn(691));
    REQUIRE(gw_group_z(GwFlavor::Sym, 23, false, t) == Zn(65520));
    REQUIRE(gw_group_z(GwFlavor::SkewSym, 3, false, t) == Zn(48));
    REQUIRE(gw_group_z(GwFlavor::SkewSym, 11, false, t) == Zn(1008));
    REQUIRE(gw_group_z(GwFlavor::SkewSym, 19, false, t) == Zn(528));
    REQUIRE(gw_group_z(GwFlavor::SkewSym, 22, false, t) ==
            FgAbelianGroup::from_factors(1, {Int(691)}));
    REQUIRE(gw_group_z(GwFlavor::GenuineQuad, 1, false, t) ==
            FgAbelianGroup::from_factors(0, {Int(2), Int(2)}));
    REQUIRE(gw_group_z(GwFlavor::SkewGenuineQuad, 0, false, t) ==
            FgAbelianGroup::from_factors(1, {Int(2)}));
    REQUIRE(gw_group_z(GwFlavor::SkewGenuineQuad, 1, false, t) == Zn(4));
    REQUIRE(gw_group_z(GwFlavor::SkewGenuineQuad, 2, false, t) == Z());
    REQUIRE(gw_group_z(GwFlavor::SkewGenuineQuad, 3, false, t) == Zn(24));
    // genuine flavors join the symmetric ones in higher degrees
    for (long n = 2; n <= 17; ++n)
        REQUIRE(gw_group_z(GwFlavor::GenuineQuad, n, false, t) ==
                gw_group_z(GwFlavor::Sym, n, false, t));
    for (long n = 4; n <= 17; ++n)
        REQUIRE(gw_group_z(GwFlavor::SkewGenuineQuad, n, false, t) ==
                gw_group_z(GwFlavor::SkewSym, n, false, t));
}

TEST_CASE("GW at n = 3 (8) matches the w table from the bernoulli module") {
    BernoulliTable t;
    for (long k = 0; k <= 10; ++k) {
        auto g = gw_group_z(GwFlavor::Sym, 8 * k + 3, false, t);
        REQUIRE(g == FgAbelianGroup::cyclic(t.w_denominator(4 * k + 2)));
    }
}

TEST_CASE("euler characteristic of the paper's 2-adic sequence") {
    // 0 -> Z/2 + Z/8 -> L_0^s(2-adic integers) -> L_{-1}^q(Z) -> 0 forces the
    // last term to be trivial, with the middle term computed by enumeration
    auto middle = integral_kernel_order(Int(2));
    auto sub = FgAbelianGroup::from_factors(0, {Int(2), Int(8)});
    auto lq = l_group(ring_z(), LFlavor::Quad, -1);
    REQUIRE(exact_order_check({zero(), sub, middle, lq, zero()}));
    REQUIRE(lq == zero());
}

TEST_CASE("rendering formats") {
    BernoulliTable t;
    std::vector<FgAbelianGroup> sym, skew;
    for (long n = 0; n <= 3; ++n) {
        sym.push_back(gw_group_z(GwFlavor::Sym, n, false, t));
        skew.push_back(gw_group_z(GwFlavor::SkewSym, n, false, t));
    }
    auto md = render_table({"GW^s", "GW^{-s}"}, {sym, skew}, 0, TableFormat::Markdown);
    REQUIRE(md.find("| 3 | ℤ/24 | ℤ/48 |") != std::string::npos);
    auto csv = render_table({"GW^s", "GW^{-s}"}, {sym, skew}, 0, TableFormat::Csv);
    REQUIRE(csv.find("3,ℤ/24,ℤ/48") != std::string::npos);
    auto js = render_table({"sym"}, {sym}, 0, TableFormat::Json);
    REQUIRE(js.find("\"3\":{\"sym\":{\"rank\":0,\"torsion\":[24]") != std::string::npos);

    // empty range: header only
    auto empty = render_table({"GW^s"}, {std::vector<FgAbelianGroup>{}}, 0,
                              TableFormat::Markdown);
    REQUIRE(empty == "| n | GW^s |\n|---|---|\n");

    // conditional marker
    FgAbelianGroup cond = Zn(6);
    cond.conditional = true;
    auto mc = render_table({"x"}, {{cond}}, 5, TableFormat::Markdown);
    REQUIRE(mc.find("ℤ/6*") != std::string::npos);
}

TEST_CASE("general-degree formulas against the prime-local w oracle") {
    BernoulliTable t;
    auto primes = primes_up_to(500);
    for (long m = 1; m <= 60; ++m)
        REQUIRE(t.w_denominator(2 * m) == oracles::w_prime_local(2 * m, primes));
}
