#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gwcalc/numeric.hpp"

namespace gwcalc {

/// Finite field F_{p^e}. Elements are coefficient vectors of length e over
/// F_p (little-endian polynomial basis). For e > 1 the modulus is the
/// lexicographically first monic irreducible polynomial of degree e.
class GaloisField {
public:
    using Elem = std::vector<std::int64_t>;

    GaloisField(std::int64_t p, int e = 1) : p_(p), e_(e) {
        if (e < 1 || p < 2 || !is_prime(Int(static_cast<long>(p))))
            throw std::invalid_argument("GaloisField: p must be prime, e >= 1");
        if (e > 1) modulus_ = find_irreducible();
    }

    std::int64_t p() const { return p_; }
    int degree() const { return e_; }
    Int order() const { return pow_int(Int(static_cast<long>(p_)), static_cast<unsigned long>(e_)); }
    bool char2() const { return p_ == 2; }
    const std::vector<std::int64_t>& modulus() const { return modulus_; }

    Elem zero() const { return Elem(static_cast<size_t>(e_), 0); }
    Elem one() const { return from_int(1); }

    Elem from_int(std::int64_t x) const {
        Elem r = zero();
        std::int64_t m = x % p_;
        r[0] = m < 0 ? m + p_ : m;
        return r;
    }

    Elem from_mpz(const Int& x) const {
        Int m = x % Int(static_cast<long>(p_));
        if (m < 0) m += static_cast<long>(p_);
        return from_int(m.get_si());
    }

    // Reduction of a rational with denominator prime to p.
    Elem from_rat(const Rat& x) const {
        Elem n = from_mpz(Int(x.get_num()));
        Elem d = from_mpz(Int(x.get_den()));
        if (is_zero(d)) throw std::domain_error("from_rat: denominator divisible by p");
        return mul(n, inv(d));
    }

    Elem from_coeffs(std::vector<std::int64_t> c) const {
        if (static_cast<int>(c.size()) > e_)
            throw std::invalid_argument("from_coeffs: degree too large");
        c.resize(static_cast<size_t>(e_), 0);
        for (auto& x : c) {
            x %= p_;
            if (x < 0) x += p_;
        }
        return c;
    }

    bool is_zero(const Elem& a) const {
        for (auto x : a)
            if (x != 0) return false;
        return true;
    }

    bool eq(const Elem& a, const Elem& b) const { return a == b; }

    Elem add(const Elem& a, const Elem& b) const {
        Elem r(a);
        for (int i = 0; i < e_; ++i) r[i] = (r[i] + b[i]) % p_;
        return r;
    }

    Elem neg(const Elem& a) const {
        Elem r(a);
        for (auto& x : r) x = x == 0 ? 0 : p_ - x;
        return r;
    }

    Elem sub(const Elem& a, const Elem& b) const { return add(a, neg(b)); }

    Elem mul(const Elem& a, const Elem& b) const {
        std::vector<std::int64_t> prod(static_cast<size_t>(2 * e_ - 1), 0);
        for (int i = 0; i < e_; ++i) {
            if (a[i] == 0) continue;
            for (int j = 0; j < e_; ++j)
                prod[i + j] = mod_add(prod[i + j], mod_mul(a[i], b[j]));
        }
        reduce(prod);
        prod.resize(static_cast<size_t>(e_));
        return prod;
    }

    Elem inv(const Elem& a) const {
        if (is_zero(a)) throw std::domain_error("GaloisField: inverse of zero");
        // a^(q-2)
        Int k = order() - 2;
        return pow(a, k);
    }

    Elem pow(Elem base, Int k) const {
        Elem r = one();
        while (k > 0) {
            if (mpz_odd_p(k.get_mpz_t())) r = mul(r, base);
            base = mul(base, base);
            k >>= 1;
        }
        return r;
    }

    // Absolute trace to F_p as an integer in [0,p).
    std::int64_t trace(const Elem& a) const {
        Elem s = zero(), t = a;
        for (int i = 0; i < e_; ++i) {
            s = add(s, t);
            t = pow(t, Int(static_cast<long>(p_)));
        }
        for (int i = 1; i < e_; ++i)
            if (s[i] != 0) throw std::logic_error("trace not in prime field");
        return s[0];
    }

    bool is_square(const Elem& a) const {
        if (is_zero(a)) return true;
        if (p_ == 2) return true;  // Frobenius is surjective
        Elem t = pow(a, Int((order() - 1) / 2));
        return eq(t, one());
    }

    // Canonical nonsquare representative (first in enumeration order).
    Elem least_nonsquare() const {
        if (p_ == 2) throw std::domain_error("no nonsquares in characteristic 2");
        for (Elem a = zero(); next(a);)
            if (!is_square(a)) return a;
        throw std::logic_error("nonsquare not found");
    }

    // Enumeration: treats the coefficient vector as a little-endian counter.
    // Start from zero(); returns false once wrapped around.
    bool next(Elem& a) const {
        for (int i = 0; i < e_; ++i) {
            if (++a[i] < p_) return true;
            a[i] = 0;
        }
        return false;
    }

    std::string to_string(const Elem& a) const {
        if (e_ == 1) return std::to_string(a[0]);
        std::string s = "[";
        for (int i = 0; i < e_; ++i) {
            if (i) s += ",";
            s += std::to_string(a[i]);
        }
        return s + "]";
    }

private:
    std::int64_t p_;
    int e_;
    std::vector<std::int64_t> modulus_;  // monic, degree e_, only when e_ > 1

    std::int64_t mod_mul(std::int64_t a, std::int64_t b) const {
        return static_cast<std::int64_t>(
            static_cast<__int128>(a) * b % p_);
    }
    std::int64_t mod_add(std::int64_t a, std::int64_t b) const { return (a + b) % p_; }

    // Reduce a polynomial modulo the monic modulus, in place.
    void reduce(std::vector<std::int64_t>& f) const {
        if (e_ == 1) {
            f.resize(1);
            return;
        }
        for (int i = static_cast<int>(f.size()) - 1; i >= e_; --i) {
            std::int64_t c = f[static_cast<size_t>(i)];
            if (c == 0) continue;
            f[static_cast<size_t>(i)] = 0;
            for (int j = 0; j < e_; ++j) {
                auto& t = f[static_cast<size_t>(i - e_ + j)];
                t = ((t - mod_mul(c, modulus_[static_cast<size_t>(j)])) % p_ + p_) % p_;
            }
        }
        if (static_cast<int>(f.size()) < e_) f.resize(static_cast<size_t>(e_), 0);
    }

    using Poly = std::vector<std::int64_t>;  // little-endian, arbitrary degree

    static int deg(const Poly& f) {
        for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i)
            if (f[static_cast<size_t>(i)] != 0) return i;
        return -1;
    }

    Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& mod) const {
        Poly prod(a.size() + b.size() - 1, 0);
        for (size_t i = 0; i < a.size(); ++i) {
            if (a[i] == 0) continue;
            for (size_t j = 0; j < b.size(); ++j)
                prod[i + j] = mod_add(prod[i + j], mod_mul(a[i], b[j]));
        }
        return poly_rem(prod, mod);
    }

    Poly poly_rem(Poly f, const Poly& mod) const {
        int dm = deg(mod);
        std::int64_t lead_inv = inv_mod_p(mod[static_cast<size_t>(dm)]);
        for (int i = deg(f); i >= dm; i = deg(f)) {
            std::int64_t c = mod_mul(f[static_cast<size_t>(i)], lead_inv);
            for (int j = 0; j <= dm; ++j) {
                auto& t = f[static_cast<size_t>(i - dm + j)];
                t = ((t - mod_mul(c, mod[static_cast<size_t>(j)])) % p_ + p_) % p_;
            }
        }
        f.resize(static_cast<size_t>(dm < 1 ? 1 : dm), 0);
        if (f.empty()) f.assign(1, 0);
        return f;
    }

    Poly poly_gcd(Poly a, Poly b) const {
        while (deg(b) >= 0) {
            Poly r = poly_rem(a, b);
            a = b;
            b = r;
        }
        return a;
    }

    std::int64_t inv_mod_p(std::int64_t a) const {
        std::int64_t t = 0, nt = 1, r = p_, nr = a % p_;
        while (nr != 0) {
            std::int64_t q = r / nr;
            std::swap(t -= q * nt, nt);
            std::swap(r -= q * nr, nr);
        }
        return t < 0 ? t + p_ : t;
    }

    Poly poly_powmod_xq(int times, const Poly& mod) const {
        // x^(p^times) mod `mod`
        Poly x = {0, 1};
        Poly r = x;
        for (int t = 0; t < times; ++t) {
            // r = r^p mod `mod`
            Poly acc = {1};
            Poly base = r;
            Int k(static_cast<long>(p_));
            while (k > 0) {
                if (mpz_odd_p(k.get_mpz_t())) acc = poly_mulmod(acc, base, mod);
                base = poly_mulmod(base, base, mod);
                k >>= 1;
            }
            r = acc;
        }
        return r;
    }

    bool is_irreducible(const Poly& f) const {
        int n = deg(f);
        // x^(p^n) == x mod f, and gcd(x^(p^(n/t)) - x, f) = 1 for prime t | n
        Poly xq = poly_powmod_xq(n, f);
        Poly x = poly_rem({0, 1}, f);
        if (xq != x) return false;
        for (int t = 2; t <= n; ++t) {
            if (n % t != 0) continue;
            bool prime_t = true;
            for (int s = 2; s * s <= t; ++s)
                if (t % s == 0) prime_t = false;
            if (!prime_t) continue;
            Poly g = poly_powmod_xq(n / t, f);
            // g - x
            Poly diff = g;
            if (diff.size() < 2) diff.resize(2, 0);
            diff[1] = ((diff[1] - 1) % p_ + p_) % p_;
            if (deg(poly_gcd(f, diff)) > 0) return false;
        }
        return true;
    }

    std::vector<std::int64_t> find_irreducible() const {
        // monic degree e_: iterate lower coefficients lexicographically
        Poly f(static_cast<size_t>(e_) + 1, 0);
        f[static_cast<size_t>(e_)] = 1;
        for (;;) {
            if (is_irreducible(f)) {
                Poly low(f.begin(), f.begin() + e_);
                return low;
            }
            int i = 0;
            for (; i < e_; ++i) {
                if (++f[static_cast<size_t>(i)] < p_) break;
                f[static_cast<size_t>(i)] = 0;
            }
            if (i == e_) throw std::logic_error("no irreducible polynomial found");
        }
    }
};

/// Field-concept adapter for exact rationals, so the form algorithms can be
/// instantiated uniformly over Q and over finite fields.
struct RationalField {
    using Elem = Rat;

    bool char2() const { return false; }
    Elem zero() const { return Rat(0); }
    Elem one() const { return Rat(1); }
    bool is_zero(const Elem& a) const { return a == 0; }
    bool eq(const Elem& a, const Elem& b) const { return a == b; }
    Elem add(const Elem& a, const Elem& b) const { return Rat(a + b); }
    Elem sub(const Elem& a, const Elem& b) const { return Rat(a - b); }
    Elem neg(const Elem& a) const { return Rat(-a); }
    Elem mul(const Elem& a, const Elem& b) const { return Rat(a * b); }
    Elem inv(const Elem& a) const {
        if (a == 0) throw std::domain_error("division by zero");
        return Rat(1 / a);
    }
    std::string to_string(const Elem& a) const { return a.get_str(); }
};

}  // namespace gwcalc
