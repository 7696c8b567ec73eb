#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "gwcalc/forms.hpp"

using namespace gwcalc;

namespace {

QMat congruent(const QMat& u, const QMat& g) {
    return matq::mul(matq::transpose(u), matq::mul(g, u));
}

QMat random_invertible(std::mt19937_64& rng, size_t n) {
    std::uniform_int_distribution<long> d(-3, 3);
    QMat u = matq::identity(static_cast<long>(n));
    for (int k = 0; k < 8; ++k) {
        size_t i = rng() % n, j = rng() % n;
        if (i == j) continue;
        Rat c(d(rng));
        for (size_t t = 0; t < n; ++t) u[t][i] += c * u[t][j];
    }
    // random permutation keeps it invertible
    for (size_t i = n; i > 1; --i) std::swap(u[i - 1], u[rng() % i]);
    return u;
}

SymBilForm random_sym_form_q(std::mt19937_64& rng, size_t n) {
    std::uniform_int_distribution<long> d(-6, 6);
    for (;;) {
        QMat g(n, std::vector<Rat>(n, Rat(0)));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i; j < n; ++j) g[i][j] = g[j][i] = Rat(d(rng));
        if (matq::det(g) == 0) continue;
        return make_sym_bil_form(Domain::rationals(), 1, g);
    }
}

std::vector<Int> square_class_multiset(const std::vector<Rat>& entries) {
    std::vector<Int> cls;
    for (const auto& e : entries) cls.push_back(squarefree_part(e));
    std::sort(cls.begin(), cls.end());
    return cls;
}

}  // namespace

TEST_CASE("standard forms") {
    auto h = standard_bilinear(StandardBilinear::HyperbolicSym, Domain::rationals());
    REQUIRE(h.gram_q == QMat{{Rat(0), Rat(1)}, {Rat(1), Rat(0)}});

    auto hs = standard_bilinear(StandardBilinear::HyperbolicSkew, Domain::rationals());
    REQUIRE(hs.epsilon == -1);
    REQUIRE(hs.gram_q == QMat{{Rat(0), Rat(1)}, {Rat(-1), Rat(0)}});

    auto q1 = standard_quadratic(StandardQuadratic::HypArf1, Domain::finite_field(2));
    auto pol = polarization(q1);
    auto skew_plane = make_sym_bil_form(Domain::finite_field(2), -1,
                                        {{Rat(0), Rat(1)}, {Rat(-1), Rat(0)}});
    REQUIRE(pol.gram_f == skew_plane.gram_f);

    auto e8 = standard_bilinear(StandardBilinear::E8, Domain::integers());
    REQUIRE(is_unimodular(e8));
    for (int i = 0; i < 8; ++i) REQUIRE(e8.gram_q[i][i].get_num() % 2 == 0);
    REQUIRE(signature(e8) == 8);

    REQUIRE_THROWS_AS(
        standard_quadratic(StandardQuadratic::Diag, Domain::finite_field(2), {Rat(1)}),
        std::domain_error);
}

TEST_CASE("diagonalize over Q") {
    auto h = standard_bilinear(StandardBilinear::HyperbolicSym, Domain::rationals());
    // congruence oracle: U^T [[0,1],[1,0]] U = diag(1,-1)
    QMat u = {{Rat(1), Rat(1)}, {Rat(1, 2), Rat(-1, 2)}};
    REQUIRE(congruent(u, h.gram_q) == QMat{{Rat(1), Rat(0)}, {Rat(0), Rat(-1)}});
    auto d = diagonalize_rational(h);
    REQUIRE(congruent(d.change, h.gram_q) ==
            QMat{{d.entries[0], Rat(0)}, {Rat(0), d.entries[1]}});
    // one positive, one negative entry: the form is <1,-1> up to isometry
    REQUIRE(d.entries[0] * d.entries[1] < 0);
    REQUIRE(discriminant(h).value_q == 1);

    auto already = diag_form({Rat(2), Rat(3)});
    auto e = diagonalize_rational(already);
    REQUIRE(e.entries == std::vector<Rat>({Rat(2), Rat(3)}));
    REQUIRE(e.change == matq::identity(2));

    auto e8 = standard_bilinear(StandardBilinear::E8, Domain::rationals());
    auto de8 = diagonalize_rational(e8);
    for (const auto& x : de8.entries) REQUIRE(x > 0);

    auto sing = make_sym_bil_form(Domain::rationals(), 1, {{Rat(0)}});
    REQUIRE_THROWS_AS(diagonalize_rational(sing), std::domain_error);
}

TEST_CASE("signature") {
    REQUIRE(signature(standard_bilinear(StandardBilinear::E8, Domain::integers())) == 8);
    REQUIRE(signature(standard_bilinear(StandardBilinear::HyperbolicSym,
                                        Domain::rationals())) == 0);
    REQUIRE(signature(diag_form({Rat(1), Rat(1), Rat(-1)})) == 1);
}

TEST_CASE("discriminant") {
    REQUIRE(discriminant(diag_form({Rat(1), Rat(-1)})).value_q == 1);
    REQUIRE(discriminant(diag_form({Rat(2)})).value_q == 2);

    auto f3 = make_sym_bil_form(Domain::finite_field(3), 1,
                                {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}});
    GaloisField F3(3);
    // (-1)^1 * 1 = 2 mod 3, the nonsquare class
    REQUIRE(discriminant(f3).value_f == F3.least_nonsquare());
}

TEST_CASE("unimodularity") {
    REQUIRE(is_unimodular(standard_bilinear(StandardBilinear::E8, Domain::integers())));
    REQUIRE(!is_unimodular(diag_form({Rat(2)}, Domain::integers())));
    REQUIRE(is_unimodular(standard_bilinear(StandardBilinear::HyperbolicSym,
                                            Domain::integers())));
}

TEST_CASE("symplectic basis") {
    auto h = standard_bilinear(StandardBilinear::HyperbolicSkew, Domain::rationals());
    REQUIRE(symplectic_basis(h) == matq::identity(2));

    auto scaled = make_sym_bil_form(Domain::rationals(), -1,
                                    {{Rat(0), Rat(2)}, {Rat(-2), Rat(0)}});
    auto b = symplectic_basis(scaled);
    REQUIRE(congruent(b, scaled.gram_q) ==
            QMat{{Rat(0), Rat(1)}, {Rat(-1), Rat(0)}});

    auto odd = make_sym_bil_form(Domain::rationals(), -1, {{Rat(0)}});
    REQUIRE_THROWS_AS(symplectic_basis(odd), std::domain_error);

    // rank-4 alternating unimodular over F2 splits into two hyperbolic planes
    std::mt19937_64 rng(5);
    int built = 0;
    while (built < 10) {
        QMat g(4, std::vector<Rat>(4, Rat(0)));
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) g[i][j] = g[j][i] = Rat(long(rng() % 2));
        auto f = make_sym_bil_form(Domain::finite_field(2), 1, g);
        GaloisField F2(2);
        if (F2.is_zero(field_det(F2, f.gram_f))) continue;
        ++built;
        auto basis = symplectic_basis(f);
        QMat reduced = congruent(basis, g);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                long expect = (i / 2 == j / 2 && i != j) ? 1 : 0;
                REQUIRE(Int(reduced[i][j].get_num()) % 2 ==
                        (Int(expect) % 2));
            }
    }
}

TEST_CASE("arf invariants of the standard forms") {
    auto q0 = standard_quadratic(StandardQuadratic::HypArf0, Domain::finite_field(2));
    auto q1 = standard_quadratic(StandardQuadratic::HypArf1, Domain::finite_field(2));
    REQUIRE(arf_invariant(q0) == 0);
    REQUIRE(arf_invariant(q1) == 1);

    auto e8 = standard_quadratic(StandardQuadratic::E8, Domain::finite_field(2));
    REQUIRE(arf_invariant(e8) == 0);

    // over F4 the polynomial x^2+x+1 splits, so H^1 becomes hyperbolic
    auto q1f4 = standard_quadratic(StandardQuadratic::HypArf1, Domain::finite_field(2, 2));
    REQUIRE(arf_invariant(q1f4) == 0);
}

TEST_CASE("arf additivity under direct sum, exhaustively to rank 4") {
    // all nondegenerate rank-2 quadratic forms over F2 (upper-triangular coeffs)
    std::vector<QuadForm> rank2;
    for (long a = 0; a < 2; ++a)
        for (long b = 0; b < 2; ++b)
            for (long c = 0; c < 2; ++c) {
                QMat u = {{Rat(a), Rat(b)}, {Rat(0), Rat(c)}};
                auto q = make_quad_form(Domain::finite_field(2), -1, u);
                GaloisField F2(2);
                auto pol = polarization(q);
                if (F2.is_zero(field_det(F2, pol.gram_f))) continue;
                rank2.push_back(q);
            }
    REQUIRE(!rank2.empty());
    for (const auto& a : rank2)
        for (const auto& b : rank2) {
            auto s = direct_sum(a, b);
            REQUIRE(arf_invariant(s) == (arf_invariant(a) + arf_invariant(b)) % 2);
        }
}

TEST_CASE("congruence invariance of signature and discriminant") {
    std::mt19937_64 rng(1234);
    for (int it = 0; it < 60; ++it) {
        size_t n = 2 + rng() % 3;
        auto f = random_sym_form_q(rng, n);
        auto u = random_invertible(rng, n);
        auto g = make_sym_bil_form(Domain::rationals(), 1, congruent(u, f.gram_q));
        REQUIRE(signature(f) == signature(g));
        REQUIRE(discriminant(f).value_q == discriminant(g).value_q);
    }
}

TEST_CASE("strict lagrangians over finite fields") {
    auto h3 = standard_bilinear(StandardBilinear::HyperbolicSym, Domain::finite_field(3));
    auto r = find_strict_lagrangian(h3);
    REQUIRE(r.status == LagrangianStatus::Found);

    auto f5 = make_sym_bil_form(Domain::finite_field(5), 1,
                                {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}});
    auto r5 = find_strict_lagrangian(f5);
    REQUIRE(r5.status == LagrangianStatus::Found);
    // the found vector is isotropic: x^2 + y^2 = 0 mod 5
    auto v = r5.basis;
    Rat val = v[0][0] * v[0][0] + v[1][0] * v[1][0];
    REQUIRE(Int(val.get_num()) % 5 == 0);

    auto f3 = make_sym_bil_form(Domain::finite_field(3), 1,
                                {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}});
    REQUIRE(find_strict_lagrangian(f3).status == LagrangianStatus::DoesNotExist);

    REQUIRE_THROWS_AS(find_strict_lagrangian(diag_form({Rat(1)})), std::domain_error);
}

TEST_CASE("strict lagrangians over Z") {
    auto h = standard_bilinear(StandardBilinear::HyperbolicSym, Domain::integers());
    auto r = find_strict_lagrangian(h);
    REQUIRE(r.status == LagrangianStatus::Found);

    // <1,-1> over Z: e1+e2 spans a strict Lagrangian
    auto f = diag_form({Rat(1), Rat(-1)}, Domain::integers());
    auto s = find_strict_lagrangian(f);
    REQUIRE(s.status == LagrangianStatus::Found);

    // positive definite: no Lagrangian in any box
    auto g = diag_form({Rat(1), Rat(1)}, Domain::integers());
    REQUIRE(find_strict_lagrangian(g).status == LagrangianStatus::NotFoundWithinBound);
}

TEST_CASE("lagrangian output vanishes on the form and is a summand") {
    std::mt19937_64 rng(31337);
    int found = 0;
    for (int it = 0; it < 40 && found < 8; ++it) {
        auto f = random_sym_form_q(rng, 2 + 2 * (rng() % 2));
        QMat g = f.gram_q;
        // move to F5
        SymBilForm ff;
        try {
            ff = make_sym_bil_form(Domain::finite_field(5), 1, g);
        } catch (const std::exception&) {
            continue;
        }
        GaloisField F5(5);
        if (F5.is_zero(field_det(F5, ff.gram_f))) continue;
        auto r = find_strict_lagrangian(ff);
        if (r.status != LagrangianStatus::Found) continue;
        ++found;
        size_t n = g.size(), m = r.basis[0].size();
        for (size_t a = 0; a < m; ++a)
            for (size_t b = 0; b < m; ++b) {
                Rat s(0);
                for (size_t i = 0; i < n; ++i)
                    for (size_t j = 0; j < n; ++j)
                        s += r.basis[i][a] * g[i][j] * r.basis[j][b];
                REQUIRE(Int(s.get_num()) % 5 == 0);
            }
    }
    REQUIRE(found > 0);
}
