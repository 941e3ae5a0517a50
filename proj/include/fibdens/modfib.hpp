#pragma once

#include <cstdint>
#include <string>

#include "fibdens/errors.hpp"
#include "fibdens/primes.hpp"
#include "fibdens/rational.hpp"

namespace fibdens {

// (F(n) mod m, F(n+1) mod m) for a given index and modulus.
struct FibPair {
    std::uint64_t n;
    Integer m;
    Integer f_n;
    Integer f_n1;

    // One index step: (f_n, f_n1) -> (f_n1, f_n + f_n1 mod m).
    void advance() {
        Integer next = (f_n + f_n1) % m;
        f_n = f_n1;
        f_n1 = next;
        ++n;
    }
};

// Fast doubling: F(2k) = F(k)(2F(k+1) - F(k)), F(2k+1) = F(k)^2 + F(k+1)^2.
inline FibPair fib_pair_mod(std::uint64_t n, const Integer& m) {
    if (m < 2) throw std::invalid_argument("fib_pair_mod: modulus must be >= 2");
    Integer a = 0, b = 1; // F(0), F(1)
    for (int bit = 63; bit >= 0; --bit) {
        Integer t = (2 * b - a) % m;
        if (t < 0) t += m;
        Integer c = (a * t) % m;           // F(2k)
        Integer d = (a * a + b * b) % m;   // F(2k+1)
        if ((n >> bit) & 1) {
            a = d;
            b = (c + d) % m;
        } else {
            a = c;
            b = d;
        }
    }
    return FibPair{n, m, a, b};
}

inline Integer fib_mod(std::uint64_t n, const Integer& m) {
    return fib_pair_mod(n, m).f_n;
}

// L(n) = 2 F(n+1) - F(n).
inline Integer lucas_mod(std::uint64_t n, const Integer& m) {
    FibPair fp = fib_pair_mod(n, m);
    Integer l = (2 * fp.f_n1 - fp.f_n) % m;
    if (l < 0) l += m;
    return l;
}

// epsilon = (p/5): +1 for p = 1,4 mod 5; -1 for p = 2,3 mod 5; 0 for p = 5.
inline int epsilon(std::uint64_t p) {
    if (!is_prime_u64(p)) throw std::invalid_argument("epsilon: p must be prime");
    if (p == 5) return 0;
    std::uint64_t r = p % 5;
    return (r == 1 || r == 4) ? 1 : -1;
}

// Vinson trichotomy value pi(p)/alpha(p) in {4, 1, 2}.
inline int ratio_class_of_alpha(std::uint64_t alpha) {
    if (alpha % 2 == 1) return 4;
    if (alpha % 4 == 2) return 1;
    return 2;
}

struct PeriodInfo {
    std::uint64_t p;
    int epsilon;
    std::uint64_t alpha;
    std::uint64_t pi;
    int ratio_class;
};

// alpha(p) is the smallest divisor d of p - epsilon with F(d) = 0 mod p,
// since alpha divides p - epsilon and F(d) = 0 iff alpha | d. The linear
// scan fallback exists for auditing the divisor shortcut.
inline PeriodInfo period_info(std::uint64_t p, bool linear_scan = false) {
    if (!is_prime_u64(p)) throw std::invalid_argument("period_info: p must be prime");
    if (p == 2) return PeriodInfo{2, epsilon(2), 3, 3, 1};
    Integer pm(static_cast<unsigned long>(p));
    std::uint64_t alpha = 0;
    int eps = epsilon(p);
    if (p == 5) {
        alpha = 5;
    } else if (linear_scan) {
        Integer a = 0, b = 1;
        for (std::uint64_t m = 1;; ++m) {
            Integer next = (a + b) % pm;
            a = b;
            b = next;
            if (a == 0) { alpha = m; break; }
        }
    } else {
        std::uint64_t target = static_cast<std::uint64_t>(
            static_cast<std::int64_t>(p) - eps);
        for (std::uint64_t d : divisors_u64(target)) {
            if (fib_mod(d, pm) == 0) { alpha = d; break; }
        }
        if (alpha == 0)
            throw internal_inconsistency_error(
                "period_info: no divisor of p - epsilon is a Fibonacci zero for p = " +
                std::to_string(p));
    }
    int rc = ratio_class_of_alpha(alpha);
    std::uint64_t pi = static_cast<std::uint64_t>(rc) * alpha;
    FibPair check = fib_pair_mod(pi, pm);
    if (check.f_n != 0 || check.f_n1 != 1)
        throw internal_inconsistency_error(
            "period_info: F(pi), F(pi+1) verification failed for p = " + std::to_string(p));
    return PeriodInfo{p, eps, alpha, pi, rc};
}

// Burr: all residues mod m are attained iff m = 5^k m' with
// m' in {1, 2, 4, 6, 7, 14} or m' a power of 3.
inline bool attains_all_residues(std::uint64_t m) {
    if (m < 2) throw std::invalid_argument("attains_all_residues: modulus must be >= 2");
    while (m % 5 == 0) m /= 5;
    if (m == 1 || m == 2 || m == 4 || m == 6 || m == 7 || m == 14) return true;
    while (m % 3 == 0) m /= 3;
    return m == 1;
}

} // namespace fibdens
