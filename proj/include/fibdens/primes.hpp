#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "fibdens/errors.hpp"

namespace fibdens {

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<__uint128_t>(a) * b) % m);
}

inline std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1) r = mulmod_u64(r, base, m);
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    return r;
}

// Deterministic Miller-Rabin for 64-bit inputs.
inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL,
                            23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % q == 0) return n == q;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    // This base set is deterministic for all n < 2^64.
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL,
                            23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

namespace detail {

inline std::uint64_t pollard_rho(std::uint64_t n) {
    if ((n & 1) == 0) return 2;
    for (std::uint64_t c = 1;; ++c) {
        auto f = [n, c](std::uint64_t x) {
            return (mulmod_u64(x, x, n) + c) % n;
        };
        std::uint64_t x = 2, y = 2, d = 1;
        while (d == 1) {
            x = f(x);
            y = f(f(y));
            std::uint64_t diff = x > y ? x - y : y - x;
            d = std::gcd(diff, n);
        }
        if (d != n) return d;
    }
}

inline void factorize_into(std::uint64_t n, std::map<std::uint64_t, int>& out) {
    if (n == 1) return;
    if (is_prime_u64(n)) {
        out[n] += 1;
        return;
    }
    // Trial division first; Pollard rho for the stubborn cofactor.
    for (std::uint64_t q = 2; q * q <= n && q < 100000; q == 2 ? q = 3 : q += 2) {
        while (n % q == 0) {
            out[q] += 1;
            n /= q;
        }
        if (n == 1) return;
        if (is_prime_u64(n)) {
            out[n] += 1;
            return;
        }
    }
    std::uint64_t d = pollard_rho(n);
    factorize_into(d, out);
    factorize_into(n / d, out);
}

} // namespace detail

inline std::map<std::uint64_t, int> factorize_u64(std::uint64_t n) {
    std::map<std::uint64_t, int> out;
    if (n >= 2) detail::factorize_into(n, out);
    return out;
}

// All divisors of n, sorted ascending.
inline std::vector<std::uint64_t> divisors_u64(std::uint64_t n) {
    std::vector<std::uint64_t> divs{1};
    for (auto [q, mult] : factorize_u64(n)) {
        std::size_t count = divs.size();
        std::uint64_t qe = 1;
        for (int e = 1; e <= mult; ++e) {
            qe *= q;
            for (std::size_t i = 0; i < count; ++i) divs.push_back(divs[i] * qe);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

// Legendre symbol (a/p) for odd prime p, via Euler's criterion.
inline int legendre(std::uint64_t a, std::uint64_t p) {
    a %= p;
    if (a == 0) return 0;
    std::uint64_t r = powmod_u64(a, (p - 1) / 2, p);
    return r == 1 ? 1 : -1;
}

// Nonzero quadratic residues modulo an odd prime, as a membership table.
inline std::vector<bool> quadratic_residues(std::uint64_t p) {
    std::vector<bool> qr(p, false);
    for (std::uint64_t x = 1; x < p; ++x) qr[mulmod_u64(x, x, p)] = true;
    return qr;
}

inline std::vector<std::uint64_t> primes_in_range(std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint64_t> out;
    if (lo < 2) lo = 2;
    for (std::uint64_t n = lo; n <= hi && n >= lo; ++n) {
        if (is_prime_u64(n)) out.push_back(n);
    }
    return out;
}

} // namespace fibdens
