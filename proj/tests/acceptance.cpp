// Acceptance suite: twelve numbered criteria, one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fibdens/density.hpp"
#include "fibdens/modfib.hpp"
#include "fibdens/padic.hpp"
#include "fibdens/scan.hpp"
#include "fibdens/tree.hpp"

using namespace fibdens;
using padic::Basis;
using padic::Element;

namespace {

int failures = 0;

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

void criterion(int n, const std::string& name, const std::function<void(Check&)>& body) {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& ex) {
        c.ok = false;
        c.detail = std::string("exception: ") + ex.what();
    }
    auto t1 = std::chrono::steady_clock::now();
    double secs = std::chrono::duration<double>(t1 - t0).count();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", secs);
    if (c.ok) {
        std::cout << "PASS criterion " << n << ": " << name << " (" << buf << " s)\n";
    } else {
        std::cout << "FAIL criterion " << n << ": " << name << " (" << buf
                  << " s) -- " << c.detail << "\n";
        ++failures;
    }
}

Element random_unit(std::uint64_t p, int prec, std::mt19937_64& rng) {
    Basis basis = padic::basis_for_prime(p);
    Integer pk = pow_u64(p, static_cast<unsigned long>(prec));
    auto draw = [&]() -> Integer {
        Integer x = 0;
        for (int k = 0; k < prec; ++k)
            x = x * static_cast<unsigned long>(p) + static_cast<unsigned long>(rng() % p);
        return x % pk;
    };
    for (;;) {
        Integer a = draw();
        Integer b = basis == Basis::Rational ? Integer(0) : draw();
        Element x(p, basis, a, b, prec);
        if (x.is_unit()) return x;
    }
}

std::vector<std::uint64_t> sqrt5_primes(std::uint64_t hi) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p : primes_in_range(3, hi))
        if (p % 5 == 2 || p % 5 == 3) out.push_back(p);
    return out;
}

} // namespace

int main() {
    criterion(1, "density table up to 43", [](Check& c) {
        std::vector<std::pair<std::uint64_t, Rational>> expected{
            {2, make_rational(21, 32)},   {3, make_rational(1, 1)},
            {5, make_rational(1, 1)},     {7, make_rational(41, 56)},
            {11, make_rational(145, 264)}, {13, make_rational(9, 13)},
            {17, make_rational(13, 17)},  {19, make_rational(441, 760)},
            {23, make_rational(409, 552)}, {29, make_rational(541, 1740)},
            {31, make_rational(19, 31)},  {37, make_rational(29, 37)},
            {41, make_rational(715, 1722)}, {43, make_rational(33, 43)}};
        std::vector<std::uint64_t> primes = primes_in_range(2, 43);
        c.require(primes.size() == expected.size(), "prime count != 14");
        for (std::size_t k = 0; k < primes.size() && c.ok; ++k) {
            c.require(primes[k] == expected[k].first, "prime order mismatch");
            c.require(dens(primes[k]).dens == expected[k].second,
                      "dens(" + std::to_string(primes[k]) + ") mismatch");
        }
    });

    criterion(2, "worked examples with all fields", [](Check& c) {
        DensityReport r13 = dens(13);
        c.require(r13.dens == make_rational(9, 13) && r13.N == 9 &&
                      r13.lucas_zeros.zeros.empty(),
                  "dens(13) fields");
        DensityReport r19 = dens(19);
        c.require(r19.dens == make_rational(441, 760) && r19.N == 11 && r19.Z == 1,
                  "dens(19) fields");
        DensityReport r31 = dens(31);
        c.require(r31.dens == make_rational(19, 31) && r31.Z == 0 &&
                      r31.lucas_zeros.zeros.size() == 1,
                  "dens(31) fields");
        DensityReport r7 = dens(7);
        c.require(r7.dens == make_rational(41, 56) && r7.N == 5 && r7.Z == 2,
                  "dens(7) fields");
    });

    criterion(3, "large-prime spot checks", [](Check& c) {
        c.require(dens(9349).dens == make_rational(504901, 174826300), "dens(9349)");
        c.require(dens(514229).dens == make_rational(53, 514229), "dens(514229)");
    });

    criterion(4, "p = 2 residue set and image supersets", [](Check& c) {
        std::vector<std::uint64_t> expected{0,  1,  2,  3,  5,  7,  8,  9,  11, 13, 15,
                                            16, 17, 19, 21, 23, 24, 25, 27, 29, 31};
        c.require(brute_attained(2, 5).residues == expected, "residues mod 32");
        c.require(dens(2).dens == make_rational(21, 32), "dens(2)");
        // Enumerate F mod 64 over a full period.
        std::set<std::uint64_t> mod64;
        std::uint64_t a = 0, b = 1;
        do {
            mod64.insert(a);
            std::uint64_t next = (a + b) % 64;
            a = b;
            b = next;
        } while (!(a == 0 && b == 1));
        for (std::uint64_t r = 0; r < 64; ++r) {
            if (r % 4 == 3) c.require(mod64.count(r) != 0, "3 + 4Z_2 superset");
            if (r % 4 == 1) c.require(mod64.count(r) != 0, "1 + 4Z_2 superset");
            if (r % 8 == 0) c.require(mod64.count(r) != 0, "8Z_2 superset");
        }
        c.require(mod64.count(2) && mod64.count(34), "2 + 32Z_2 superset");
    });

    criterion(5, "level-density sequence for p = 19", [](Check& c) {
        std::vector<Rational> expected{make_rational(1, 1), make_rational(12, 19),
                                       make_rational(210, 361), make_rational(3981, 6859),
                                       make_rational(75621, 130321)};
        for (int lambda = 0; lambda <= 4; ++lambda)
            c.require(level_density(19, lambda) == expected[lambda],
                      "level " + std::to_string(lambda));
    });

    criterion(6, "fast/brute oracle equivalence", [](Check& c) {
        for (std::uint64_t p : {3ULL, 7ULL, 11ULL, 13ULL, 19ULL, 23ULL, 31ULL}) {
            Integer modulus = 1;
            for (int lambda = 0;; ++lambda) {
                if (modulus > 1000000) break;
                AttainedSet fast = fast_attained(p, lambda);
                AttainedSet brute = brute_attained(p, lambda);
                c.require(expand(fast) == brute.residues,
                          "p = " + std::to_string(p) + ", lambda = " +
                              std::to_string(lambda));
                modulus *= static_cast<unsigned long>(p);
            }
        }
    });

    criterion(7, "interpolation fidelity", [](Check& c) {
        for (std::uint64_t p : {7ULL, 11ULL, 13ULL, 19ULL}) {
            padic::Interpolator interp(p, 10);
            Integer mod = pow_u64(p, 6UL);
            for (std::uint64_t n = 0; n <= 60; ++n) {
                Integer got = interp.interp_value(n % interp.period().pi,
                                                  Integer(static_cast<unsigned long>(n)), 6);
                c.require(got == fib_mod(n, mod),
                          "p = " + std::to_string(p) + ", n = " + std::to_string(n));
            }
        }
        padic::Interpolator2 interp2(14);
        for (std::uint64_t n = 0; n <= 60; ++n)
            c.require(interp2.interp_at(n, 8) == fib_mod(n, Integer(256)),
                      "p = 2, n = " + std::to_string(n));
    });

    criterion(8, "Wall-exponent triple agreement below 2000", [](Check& c) {
        for (std::uint64_t p : primes_in_range(7, 1999)) {
            WallExponentRecord rec = wall_exponent(p);
            c.require(rec.via_padic && *rec.via_padic == rec.via_fib,
                      "padic channel at p = " + std::to_string(p));
            if (rec.via_lucas)
                c.require(*rec.via_lucas == rec.via_fib,
                          "lucas channel at p = " + std::to_string(p));
        }
        // Pinned regression: the Lucas characterization fails at p = 3,
        // where nu_3(L(6)) = 2 exceeds e(3) = 1.
        c.require(lucas_mod(6, Integer(27)) == 18, "L(6) = 18");
        c.require(wall_exponent(3).e == 1 && !wall_exponent(3).via_lucas.has_value(),
                  "p = 3 exclusion");
    });

    criterion(9, "digit reproduction for p = 7", [](Check& c) {
        c.require(branch_rule(7, 4, 8).c_digits ==
                      std::vector<unsigned>({3, 0, 3, 4, 3, 6, 4, 1}),
                  "i = 4 digits");
        c.require(branch_rule(7, 12, 8).c_digits ==
                      std::vector<unsigned>({4, 6, 3, 2, 3, 0, 2, 5}),
                  "i = 12 digits");
    });

    criterion(10, "seeded property suites (>= 1000 cases each)", [](Check& c) {
        std::mt19937_64 rng(20260823);

        // Teichmuller lifts: roots of unity, congruent to the seed mod p.
        std::size_t cases = 0;
        for (std::uint64_t p : primes_in_range(2, 200)) {
            if (p == 5) continue;
            for (int t = 0; t < 25; ++t, ++cases) {
                Element x = random_unit(p, 5, rng);
                Element w = padic::teichmuller(x);
                Integer order = pow_u64(p, static_cast<unsigned long>(w.f())) - 1;
                c.require(w.pow(order).congruent(Element::one(p, x.basis(), 5), 5),
                          "teichmuller order at p = " + std::to_string(p));
                c.require(w.congruent(x, 1), "teichmuller congruence");
            }
        }
        c.require(cases >= 1000, "teichmuller case count");

        // Fermat quotient: nu(x^(p^f) - x) = nu(x - omega(x)).
        cases = 0;
        for (std::uint64_t p : primes_in_range(2, 150)) {
            if (p == 5) continue;
            for (int t = 0; t < 31; ++t, ++cases) {
                Element x = random_unit(p, 8, rng);
                Integer q = pow_u64(p, static_cast<unsigned long>(x.f()));
                c.require((x.pow(q) - x).valuation() ==
                              (x - padic::teichmuller(x)).valuation(),
                          "fermat quotient at p = " + std::to_string(p));
            }
        }
        c.require(cases >= 1000, "fermat quotient case count");

        // exp/log round trips on the isomorphism domains nu >= e + 1.
        cases = 0;
        for (std::uint64_t p : {3ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 2ULL}) {
            int min_e = p == 2 ? 1 : 0;
            for (int e = min_e; e <= 3; ++e) {
                for (int t = 0; t < 34; ++t, ++cases) {
                    Integer shift = pow_u64(p, static_cast<unsigned long>(e + 1));
                    Element x = random_unit(p, 10, rng).scaled(shift);
                    Element round = padic::plog(padic::pexp(x));
                    int cmp = std::min(round.prec(), 10 - e - 1);
                    c.require(round.congruent(x, cmp),
                              "log(exp) at p = " + std::to_string(p));
                    Element y = Element::one(p, x.basis(), 10) + x;
                    Element round2 = padic::pexp(padic::plog(y));
                    cmp = std::min(round2.prec(), 10 - e - 1);
                    c.require(round2.congruent(y, cmp),
                              "exp(log) at p = " + std::to_string(p));
                }
            }
        }
        c.require(cases >= 1000, "exp/log case count");

        // Norm-one units near 1 have purely-sqrt5 logarithms.
        cases = 0;
        for (std::uint64_t p : sqrt5_primes(200)) {
            for (int t = 0; t < 48; ++t, ++cases) {
                Element u = random_unit(p, 8, rng).scaled(
                    Integer(static_cast<unsigned long>(p)));
                Element v = Element::one(p, Basis::Sqrt5, 8) + u;
                Element x = v.div(v.conj());
                Element lg = padic::plog(x);
                c.require(lg.a() == 0, "rational log component at p = " + std::to_string(p));
                c.require(lg.b() == 0 || lg.b() % static_cast<unsigned long>(p) == 0,
                          "sqrt5 log component valuation");
            }
        }
        c.require(cases >= 1000, "pure sqrt5 case count");

        // Monotone level densities: mod p never attains more, proportionally,
        // than mod p^(lambda-1); deeper chains for small p.
        cases = 0;
        for (std::uint64_t p : primes_in_range(2, 8000)) {
            std::set<std::uint64_t> seen;
            std::uint64_t a = 0, b = 1 % p;
            do {
                seen.insert(a);
                std::uint64_t next = (a + b) % p;
                a = b;
                b = next;
            } while (!(a == 0 && b == 1 % p));
            Rational d1 = make_rational(Integer(static_cast<unsigned long>(seen.size())),
                                        Integer(static_cast<unsigned long>(p)));
            c.require(d1 <= 1, "level 1 density at p = " + std::to_string(p));
            ++cases;
            if (p < 100) {
                Rational prev = d1;
                for (int lambda = 2; lambda <= 3; ++lambda, ++cases) {
                    Rational d = level_density(p, lambda);
                    c.require(d <= prev,
                              "monotonicity at p = " + std::to_string(p) + ", lambda = " +
                                  std::to_string(lambda));
                    prev = d;
                }
            }
        }
        c.require(cases >= 1000, "monotone case count");

        // Full-residue predicate vs brute force (its domain is m <= 200).
        for (std::uint64_t m = 2; m <= 200; ++m) {
            std::set<std::uint64_t> attained;
            std::uint64_t a = 0, b = 1 % m;
            do {
                attained.insert(a);
                std::uint64_t next = (a + b) % m;
                a = b;
                b = next;
            } while (!(a == 0 && b == 1 % m));
            c.require(attains_all_residues(m) == (attained.size() == m),
                      "full-residue predicate at m = " + std::to_string(m));
        }
    });

    criterion(11, "squares-measure calibration", [](Check& c) {
        for (std::uint64_t p : {3ULL, 7ULL}) {
            Rational limit = square_density(p);
            for (int lambda = 0; lambda <= 4; ++lambda) {
                Integer count(static_cast<unsigned long>(brute_squares(p, lambda).size()));
                c.require(count == square_count_closed_form(p, lambda),
                          "closed form at p = " + std::to_string(p));
                // Partial sum of the geometric series over even valuations,
                // plus the tail cylinder of 0.
                Rational series = make_rational(1, pow_u64(p, lambda));
                for (int v = 0; v < lambda; v += 2)
                    series += make_rational(Integer(static_cast<unsigned long>(p - 1)),
                                            2 * pow_u64(p, v + 1));
                Rational density = make_rational(count, pow_u64(p, lambda));
                c.require(density == series, "geometric partial sum");
                c.require(density >= limit, "convergence from above");
            }
        }
    });

    criterion(12, "no Wall-Sun-Sun primes below 10^4", [](Check& c) {
        c.require(wss_sweep(3, 10000).empty(), "sweep hit");
    });

    if (failures == 0) {
        std::cout << "ACCEPTANCE: all 12 criteria passed\n";
    } else {
        std::cout << "ACCEPTANCE: " << failures << " criteria failed\n";
    }
    return failures;
}
