#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace gwcalc {

using Int = mpz_class;
using Rat = mpq_class;

inline Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

// mpq_class(n, d) does not canonicalize; call this at input boundaries.
inline Rat canon(Rat x) {
    x.canonicalize();
    return x;
}

inline bool is_prime(const Int& n) {
    return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

// p-adic valuation of a nonzero integer.
inline long valuation(Int a, const Int& p) {
    if (a == 0) throw std::domain_error("valuation: zero argument");
    long v = 0;
    Int q, r;
    for (;;) {
        mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t());
        if (r != 0) return v;
        a = q;
        ++v;
    }
}

// p-adic valuation of a nonzero rational.
inline long valuation(const Rat& a, const Int& p) {
    if (a == 0) throw std::domain_error("valuation: zero argument");
    return valuation(Int(a.get_num()), p) - valuation(Int(a.get_den()), p);
}

// Unit part a / p^v(a), exact.
inline Rat unit_part(const Rat& a, const Int& p) {
    long v = valuation(a, p);
    Rat pw(1);
    Int pp = p;
    if (v > 0) {
        mpz_pow_ui(pp.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(v));
        pw = Rat(1, pp);
    } else if (v < 0) {
        mpz_pow_ui(pp.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(-v));
        pw = Rat(pp);
    }
    return Rat(a * pw);
}

inline Int pow_int(const Int& b, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

inline Int binomial(unsigned long n, unsigned long k) {
    Int r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

// Legendre symbol (a|p), p an odd prime.
inline int legendre(const Int& a, const Int& p) {
    return mpz_legendre(a.get_mpz_t(), p.get_mpz_t());
}

inline std::vector<long> primes_up_to(long n) {
    std::vector<bool> sieve(static_cast<size_t>(n < 1 ? 0 : n) + 1, true);
    std::vector<long> out;
    for (long i = 2; i <= n; ++i) {
        if (!sieve[static_cast<size_t>(i)]) continue;
        out.push_back(i);
        for (long j = 2 * i; j <= n; j += i) sieve[static_cast<size_t>(j)] = false;
    }
    return out;
}

namespace detail {

inline Int pollard_rho(const Int& n) {
    // n odd composite, not a prime power of interest; returns a nontrivial factor
    for (Int c(1);; ++c) {
        Int x(2), y(2), d(1);
        while (d == 1) {
            x = (x * x + c) % n;
            y = (y * y + c) % n;
            y = (y * y + c) % n;
            Int diff = abs_int(x - y);
            if (diff == 0) break;
            mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
        }
        if (d != 1 && d != n) return d;
    }
}

inline void factor_into(Int n, std::map<Int, long>& out) {
    if (n <= 1) return;
    if (is_prime(n)) {
        ++out[n];
        return;
    }
    for (long p : {2L, 3L, 5L, 7L, 11L, 13L, 17L, 19L, 23L, 29L, 31L, 37L}) {
        while (n % p == 0) {
            ++out[Int(p)];
            n /= p;
        }
    }
    if (n == 1) return;
    if (is_prime(n)) {
        ++out[n];
        return;
    }
    // trial division for the mid range, rho for the rest
    for (Int p(41); p * p <= n && p < 100000; p += 2) {
        while (n % p == 0) {
            ++out[p];
            n /= p;
        }
        if (n == 1) return;
        if (is_prime(n)) {
            ++out[n];
            return;
        }
    }
    if (n == 1) return;
    if (is_prime(n)) {
        ++out[n];
        return;
    }
    Int d = pollard_rho(n);
    factor_into(d, out);
    factor_into(Int(n / d), out);
}

}  // namespace detail

inline std::map<Int, long> factorize(const Int& n) {
    if (n == 0) throw std::domain_error("factorize: zero argument");
    std::map<Int, long> out;
    detail::factor_into(abs_int(n), out);
    return out;
}

// Signed squarefree representative of the square class of a nonzero rational.
inline Int squarefree_part(const Rat& a) {
    if (a == 0) throw std::domain_error("squarefree_part: zero argument");
    Int n = Int(a.get_num() * a.get_den());
    int sign = n < 0 ? -1 : 1;
    Int r(1);
    for (const auto& [p, e] : factorize(n))
        if (e % 2 != 0) r *= p;
    return sign < 0 ? Int(-r) : r;
}

// Representative of x in [0,1) modulo Z.
inline Rat mod_one(const Rat& x) {
    Int fl;
    mpz_fdiv_q(fl.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
    return Rat(x - Rat(fl));
}

inline Rat parse_rational(const std::string& s) {
    Rat r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    r.canonicalize();
    return r;
}

}  // namespace gwcalc
