#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gwcalc/abelian.hpp"
#include "gwcalc/numeric.hpp"

namespace gwcalc {

/// Exact Bernoulli numbers B_2n with the derived arithmetic: numerators c_n
/// and denominators w_2n of |B_2n / 4n|.
///
/// The default path is the memoized convolution recurrence
/// sum_{k=0}^{m} C(m+1,k) B_k = 0. For large indices an all-integer tangent
/// number (Seidel triangle) pipeline is available.
class BernoulliTable {
public:
    enum class Mode { Recurrence, Tangent };

    explicit BernoulliTable(long tangent_threshold = 2000)
        : tangent_threshold_(tangent_threshold) {}

    /// B_{2n} for 2n >= 2 (pass the even index).
    const Rat& bernoulli(long two_n) {
        if (two_n < 2 || two_n % 2 != 0)
            throw std::invalid_argument("bernoulli: positive even index required");
        auto it = cache_.find(two_n);
        if (it != cache_.end()) return it->second;
        if (two_n > tangent_threshold_)
            return cache_.emplace(two_n, bernoulli_tangent(two_n)).first->second;
        extend_recurrence(two_n);
        return cache_.at(two_n);
    }

    /// Numerator of |B_{2n} / 4n| in lowest terms (an odd number).
    Int c_numerator(long n) {
        if (n < 1) throw std::invalid_argument("c_numerator: n >= 1 required");
        Rat v = bernoulli(2 * n) / Rat(4 * n);
        v.canonicalize();
        return abs_int(Int(v.get_num()));
    }

    /// Denominator of |B_{2n} / 4n| in lowest terms; argument is 2n.
    Int w_denominator(long two_n) {
        if (two_n < 2 || two_n % 2 != 0)
            throw std::invalid_argument("w_denominator: positive even index required");
        Rat v = bernoulli(two_n) / Rat(2 * two_n);
        v.canonicalize();
        return Int(v.get_den());
    }

    /// Single B_{2n} via integer tangent numbers:
    /// B_{2n} = (-1)^(n-1) * 2n * T_n / (4^n (4^n - 1)).
    static Rat bernoulli_tangent(long two_n) {
        long n = two_n / 2;
        auto t = tangent_numbers(n);
        Int four_n = pow_int(Int(4), static_cast<unsigned long>(n));
        Rat b(Int(2 * n) * t[static_cast<size_t>(n - 1)], four_n * (four_n - 1));
        b.canonicalize();
        if (n % 2 == 0) b = -b;
        return b;
    }

    /// Tangent numbers T_1..T_n by the Seidel triangle (all-integer).
    static std::vector<Int> tangent_numbers(long n) {
        std::vector<Int> t(static_cast<size_t>(n));
        t[0] = 1;
        for (long k = 2; k <= n; ++k)
            t[static_cast<size_t>(k - 1)] = t[static_cast<size_t>(k - 2)] * (k - 1);
        for (long k = 2; k <= n; ++k)
            for (long j = k; j <= n; ++j)
                t[static_cast<size_t>(j - 1)] =
                    t[static_cast<size_t>(j - 2)] * (j - k) +
                    t[static_cast<size_t>(j - 1)] * (j - k + 2);
        return t;
    }

    /// Merge rows from a persisted CSV cache (2n,B,c,w per row).
    void load_csv(const std::string& path) {
        std::ifstream in(path);
        if (!in) return;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ss(line);
            std::string f0, f1;
            if (!std::getline(ss, f0, ',') || !std::getline(ss, f1, ',')) continue;
            long two_n = std::stol(f0);
            Rat b = parse_rational(f1);
            auto it = cache_.find(two_n);
            if (it != cache_.end()) {
                if (it->second != b)
                    throw std::runtime_error("bernoulli cache mismatch at " + f0);
            } else {
                cache_.emplace(two_n, b);
            }
        }
    }

    /// Write all cached rows atomically (temp file + rename).
    void save_csv(const std::string& path) {
        std::string tmp = path + ".tmp";
        {
            std::ofstream out(tmp);
            if (!out) throw std::runtime_error("cannot write " + tmp);
            for (auto& [two_n, b] : cache_) {
                long n = two_n / 2;
                Rat v = b / Rat(4 * n);
                v.canonicalize();
                out << two_n << "," << b.get_str() << "," << abs_int(Int(v.get_num())).get_str()
                    << "," << v.get_den().get_str() << "\n";
            }
        }
        std::filesystem::rename(tmp, path);
    }

    const std::map<long, Rat>& cache() const { return cache_; }

private:
    long tangent_threshold_;
    std::map<long, Rat> cache_;  // even index -> B_{2n}

    void extend_recurrence(long target) {
        // B_m = -1/(m+1) [ C(m+1,0) B_0 + C(m+1,1) B_1 + sum_{even k<m} C(m+1,k) B_k ]
        for (long m = 2; m <= target; m += 2) {
            if (cache_.count(m)) continue;
            Rat acc = Rat(1) - Rat(m + 1, 2);  // B_0 and C(m+1,1) B_1 terms
            for (long k = 2; k < m; k += 2) {
                auto it = cache_.find(k);
                if (it == cache_.end()) throw std::logic_error("recurrence gap");
                acc += Rat(binomial(static_cast<unsigned long>(m + 1),
                                    static_cast<unsigned long>(k))) *
                       it->second;
            }
            Rat bm = -acc / Rat(m + 1);
            bm.canonicalize();
            cache_.emplace(m, bm);
        }
    }
};

/// Verification report for the von Staudt-Clausen facts: v_2(w_{2n}) = v_2(8n)
/// and denominator(B_{2n}) = prod of primes p with (p-1) | 2n.
struct VonStaudtReport {
    bool ok = true;
    long first_failure = 0;
    std::string detail;
};

inline VonStaudtReport von_staudt_checks(long n_max, BernoulliTable& table) {
    VonStaudtReport rep;
    auto primes = primes_up_to(2 * n_max + 1);
    for (long n = 1; n <= n_max; ++n) {
        Int w = table.w_denominator(2 * n);
        if (valuation(w, Int(2)) != valuation(Int(8 * n), Int(2))) {
            rep.ok = false;
            rep.first_failure = n;
            rep.detail = "v_2(w_{2n}) != v_2(8n)";
            return rep;
        }
        Int vsc(1);
        for (long p : primes)
            if ((2 * n) % (p - 1) == 0) vsc *= p;
        if (Int(table.bernoulli(2 * n).get_den()) != vsc) {
            rep.ok = false;
            rep.first_failure = n;
            rep.detail = "von Staudt-Clausen denominator";
            return rep;
        }
    }
    return rep;
}

/// K_n(Z) per the 8-periodic residue table, with c/w inputs. The conditional
/// flag marks odd-torsion structure that relies on the Vandiver conjecture:
/// cleared by assume_vandiver, and unconditional at n = 4m-2 for
/// m <= unconditional_bound (5000 per the known verification range).
inline FgAbelianGroup k_group_z(long n, bool assume_vandiver, BernoulliTable& table,
                                long unconditional_bound = 5000) {
    if (n < 0) throw std::invalid_argument("k_group_z: n >= 0 required");
    if (n == 0) return FgAbelianGroup::free(1);
    if (n == 1) return FgAbelianGroup::cyclic(Int(2));
    FgAbelianGroup g;
    switch (n % 8) {
        case 0:  // trivial, conditionally on Vandiver
            g = FgAbelianGroup::trivial();
            g.conditional = !assume_vandiver;
            return g;
        case 1:
            g = FgAbelianGroup::from_factors(1, {Int(2)});
            return g;
        case 2: {  // order 2 c_m, m = (n+2)/4; Z/2 + cyclic odd part
            long m = (n + 2) / 4;
            Int c = table.c_numerator(m);
            g = FgAbelianGroup::from_factors(0, {Int(2), c});
            g.conditional = c != 1 && !assume_vandiver && m > unconditional_bound;
            return g;
        }
        case 3:
            return FgAbelianGroup::cyclic(Int(2) * table.w_denominator((n + 1) / 2));
        case 4:
            return FgAbelianGroup::trivial();
        case 5:
            return FgAbelianGroup::free(1);
        case 6: {  // cyclic of order c_m, m = (n+2)/4
            long m = (n + 2) / 4;
            Int c = table.c_numerator(m);
            g = FgAbelianGroup::cyclic(c);
            g.conditional = c != 1 && !assume_vandiver && m > unconditional_bound;
            return g;
        }
        case 7:
            return FgAbelianGroup::cyclic(table.w_denominator((n + 1) / 2));
    }
    throw std::logic_error("unreachable");
}

/// Odd part of a finite group (divides out the 2-primary part factorwise).
inline FgAbelianGroup odd_part(const FgAbelianGroup& g) {
    if (!g.is_finite()) throw std::invalid_argument("odd_part: finite groups only");
    std::vector<Int> f;
    for (auto d : g.invariant_factors) {
        while (d % 2 == 0) d /= 2;
        if (d != 1) f.push_back(d);
    }
    return FgAbelianGroup::from_factors(0, f, g.conditional);
}

}  // namespace gwcalc
