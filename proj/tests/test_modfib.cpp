#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "fibdens/modfib.hpp"

using namespace fibdens;

namespace {

// Independent oracle: direct iteration of the recurrence.
Integer fib_iterative(std::uint64_t n, const Integer& m) {
    Integer a = 0, b = 1;
    for (std::uint64_t i = 0; i < n; ++i) {
        Integer next = (a + b) % m;
        a = b;
        b = next;
    }
    return a;
}

Integer lucas_iterative(std::uint64_t n, const Integer& m) {
    Integer a = 2 % m, b = 1;
    for (std::uint64_t i = 0; i < n; ++i) {
        Integer next = (a + b) % m;
        a = b;
        b = next;
    }
    return a;
}

} // namespace

TEST_CASE("fib_pair_mod matches the sequence mod 7") {
    // 0, 1, 1, 2, 3, 5, 1, 6, 0, ...
    FibPair fp = fib_pair_mod(8, 7);
    CHECK(fp.f_n == 0);
    CHECK(fp.f_n1 == 6);
}

TEST_CASE("fib_pair_mod initial conditions") {
    FibPair fp = fib_pair_mod(0, 97);
    CHECK(fp.f_n == 0);
    CHECK(fp.f_n1 == 1);
}

TEST_CASE("fib_pair_mod at n = 100 against the iterative oracle") {
    Integer m(514229);
    FibPair fp = fib_pair_mod(100, m);
    CHECK(fp.f_n == fib_iterative(100, m));
    CHECK(fp.f_n1 == fib_iterative(101, m));
}

TEST_CASE("fib_pair_mod rejects modulus < 2") {
    CHECK_THROWS_AS(fib_pair_mod(5, 1), std::invalid_argument);
}

TEST_CASE("fast doubling agrees with iteration on random inputs") {
    std::mt19937_64 rng(20260823);
    std::uniform_int_distribution<std::uint64_t> ndist(0, 1000000);
    std::uniform_int_distribution<std::uint64_t> mdist(2, 1000000000ULL);
    for (int trial = 0; trial < 200; ++trial) {
        std::uint64_t n = ndist(rng) % 5000; // keep the oracle fast
        Integer m(static_cast<unsigned long>(mdist(rng)));
        CHECK(fib_pair_mod(n, m).f_n == fib_iterative(n, m));
    }
}

TEST_CASE("lucas_mod examples") {
    CHECK(lucas_mod(4, 7) == 0);   // L(4) = 7
    CHECK(lucas_mod(0, 10) == 2);  // L(0) = 2
    CHECK(lucas_mod(12, 7) == 0);  // L(12) = 322
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::uint64_t n = rng() % 2000;
        Integer m(static_cast<unsigned long>(rng() % 99998 + 2));
        CHECK(lucas_mod(n, m) == lucas_iterative(n, m));
    }
}

TEST_CASE("epsilon") {
    CHECK(epsilon(11) == 1);
    CHECK(epsilon(7) == -1);
    CHECK(epsilon(5) == 0);
    CHECK(epsilon(2) == -1); // 2 = 2 mod 5
    CHECK_THROWS_AS(epsilon(15), std::invalid_argument);
}

TEST_CASE("period_info worked examples") {
    PeriodInfo p7 = period_info(7);
    CHECK(p7.alpha == 8);
    CHECK(p7.pi == 16);
    CHECK(p7.ratio_class == 2);

    PeriodInfo p13 = period_info(13);
    CHECK(p13.alpha == 7);
    CHECK(p13.pi == 28);
    CHECK(p13.ratio_class == 4);

    PeriodInfo p2 = period_info(2);
    CHECK(p2.alpha == 3);
    CHECK(p2.pi == 3);

    PeriodInfo p19 = period_info(19);
    CHECK(p19.alpha == 18);
    CHECK(p19.pi == 18);
    CHECK(p19.ratio_class == 1);
}

TEST_CASE("divisor scan agrees with the linear-scan fallback") {
    for (std::uint64_t p : {3ULL, 7ULL, 11ULL, 13ULL, 19ULL, 31ULL, 101ULL, 514229ULL}) {
        PeriodInfo a = period_info(p);
        PeriodInfo b = period_info(p, /*linear_scan=*/true);
        CHECK(a.alpha == b.alpha);
        CHECK(a.pi == b.pi);
    }
}

TEST_CASE("period and anti-period properties for primes < 500") {
    for (std::uint64_t p : primes_in_range(2, 500)) {
        PeriodInfo info = period_info(p);
        Integer pm(static_cast<unsigned long>(p));
        // F(n + pi) = F(n) for n in a window.
        for (std::uint64_t n = 0; n <= std::min<std::uint64_t>(2 * info.pi, 300); ++n) {
            CHECK(fib_mod(n + info.pi, pm) == fib_mod(n, pm));
        }
        // Anti-period: ratio class 2 means F(alpha + n) = -F(n).
        if (info.ratio_class == 2) {
            for (std::uint64_t n = 0; n <= info.alpha; ++n) {
                Integer lhs = fib_mod(info.alpha + n, pm);
                Integer rhs = (pm - fib_mod(n, pm)) % pm;
                CHECK(lhs == rhs);
            }
        }
        // alpha divides p - epsilon for p outside {2, 5}.
        if (p != 2 && p != 5) {
            std::uint64_t target = static_cast<std::uint64_t>(
                static_cast<std::int64_t>(p) - info.epsilon);
            CHECK(target % info.alpha == 0);
        }
        // Restricted period minimality.
        CHECK(fib_mod(info.alpha, pm) == 0);
    }
}

TEST_CASE("attains_all_residues vs brute force for m <= 200") {
    for (std::uint64_t m = 2; m <= 200; ++m) {
        // Brute force: one Pisano period of F mod m.
        std::set<std::uint64_t> attained;
        std::uint64_t a = 0, b = 1 % m;
        do {
            attained.insert(a);
            std::uint64_t next = (a + b) % m;
            a = b;
            b = next;
        } while (!(a == 0 && b == 1 % m));
        bool brute_all = attained.size() == m;
        CHECK(attains_all_residues(m) == brute_all);
    }
}

TEST_CASE("attains_all_residues known examples") {
    CHECK_FALSE(attains_all_residues(11));
    CHECK(attains_all_residues(7));
    CHECK(attains_all_residues(45)); // 5 * 3^2
}
