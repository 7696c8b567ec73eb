#pragma once

// Test-only oracles, independent of the library's closed-form code paths.

#include <cstdint>
#include <map>
#include <vector>

#include "gwcalc/numeric.hpp"

namespace oracles {

using gwcalc::Int;
using gwcalc::Rat;

// Primitive-solution search for z^2 = a x^2 + b y^2 modulo p^(2v+3), where v
// bounds the valuations of a and b after squarefree reduction. A solution is
// primitive when at least one variable is a p-unit.
class HilbertBruteForce {
public:
    int symbol(const Rat& a, const Rat& b, long p) {
        Int sa = gwcalc::squarefree_part(a), sb = gwcalc::squarefree_part(b);
        auto key = std::make_tuple(p, class_key(sa, p), class_key(sb, p));
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        int r = solve(sa, sb, p) ? 1 : -1;
        cache_.emplace(key, r);
        return r;
    }

private:
    std::map<std::tuple<long, long, long>, int> cache_;

    // p-adic square-class key of a squarefree integer: valuation parity and
    // the quadratic-residue class of the unit part (mod 8 at p = 2).
    static long class_key(const Int& s, long p) {
        long v = gwcalc::valuation(s, Int(p)) % 2;
        Int u = s;
        if (v) u /= p;
        if (p == 2) {
            Int r = u % 8;
            if (r < 0) r += 8;
            return v * 100 + r.get_si();
        }
        return v * 100 + (gwcalc::legendre(u, Int(p)) == 1 ? 1 : 2);
    }

    static bool solve(const Int& a, const Int& b, long p) {
        long v = std::max(gwcalc::valuation(a, Int(p)) % 2,
                          gwcalc::valuation(b, Int(p)) % 2);
        long k = 2 * v + 3;
        long M = 1;
        for (long i = 0; i < k; ++i) M *= p;

        std::vector<std::uint8_t> sq(static_cast<size_t>(M), 0), squ = sq;
        for (long z = 0; z < M; ++z) {
            long t = static_cast<long>(
                static_cast<long long>(z) * z % M);
            sq[static_cast<size_t>(t)] = 1;
            if (z % p != 0) squ[static_cast<size_t>(t)] = 1;
        }
        auto values = [&](const Int& c, bool units_only) {
            std::vector<std::uint8_t> out(static_cast<size_t>(M), 0);
            long cm = Int((c % M) + M).get_si() % M;
            for (long x = 0; x < M; ++x) {
                if (units_only && x % p == 0) continue;
                long t = static_cast<long>(static_cast<long long>(x) * x % M);
                out[static_cast<size_t>(static_cast<long long>(cm) * t % M)] = 1;
            }
            return out;
        };
        auto A = values(a, false), Au = values(a, true);
        auto B = values(b, false), Bu = values(b, true);

        // does {t1 + t2 : X[t1], Y[t2]} meet Z?
        auto meets = [&](const std::vector<std::uint8_t>& X,
                         const std::vector<std::uint8_t>& Y,
                         const std::vector<std::uint8_t>& Z) {
            std::vector<std::uint8_t> Y2(Y);
            Y2.insert(Y2.end(), Y.begin(), Y.end());
            for (long t = 0; t < M; ++t) {
                if (!X[static_cast<size_t>(t)]) continue;
                const std::uint8_t* rot = Y2.data() + (M - t);
                for (long s = 0; s < M; ++s)
                    if (Z[static_cast<size_t>(s)] & rot[s]) return true;
            }
            return false;
        };
        return meets(Au, B, sq) || meets(A, Bu, sq) || meets(A, B, squ);
    }
};

// Multiplicative order formula for w_{2m}: v_p(w_{2m}) = 1 + v_p(4m) when
// (p-1) | 2m, else 0 (at p = 2 this is v_2(8m), the von Staudt fact).
// Independent of the Bernoulli pipeline.
inline Int w_prime_local(long two_m, const std::vector<long>& primes) {
    Int w(1);
    for (long p : primes) {
        if (two_m % (p - 1) != 0) continue;
        long e = 1, t = 2 * two_m;
        while (t % p == 0) {
            ++e;
            t /= p;
        }
        w *= gwcalc::pow_int(Int(p), static_cast<unsigned long>(e));
    }
    return w;
}

}  // namespace oracles
