#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fibdens/errors.hpp"
#include "fibdens/modfib.hpp"
#include "fibdens/padic.hpp"
#include "fibdens/primes.hpp"
#include "fibdens/rational.hpp"

namespace fibdens {

struct LucasZeroSet {
    std::uint64_t p;
    std::vector<std::uint64_t> zeros; // sorted indices in [0, pi(p))
};

// The trichotomy determines the zeros from alpha; each claimed zero is
// verified by direct evaluation, and for small p a full scan over the
// period confirms there are no others.
inline LucasZeroSet lucas_zeros(std::uint64_t p) {
    if (p == 2) throw std::invalid_argument("lucas_zeros: p must be an odd prime");
    PeriodInfo info = period_info(p);
    std::vector<std::uint64_t> zeros;
    if (info.alpha % 2 == 0) {
        zeros.push_back(info.alpha / 2);
        if (info.alpha % 4 == 0) zeros.push_back(3 * info.alpha / 2);
    }
    Integer pm(static_cast<unsigned long>(p));
    for (std::uint64_t i : zeros) {
        if (lucas_mod(i, pm) != 0)
            throw internal_inconsistency_error(
                "lucas_zeros: claimed zero fails direct check at p = " + std::to_string(p));
    }
    if (p < 100000) {
        // Full scan: L(i) via one pass of the recurrence.
        std::uint64_t l0 = 2 % p, l1 = 1;
        std::size_t found = 0;
        for (std::uint64_t i = 0; i < info.pi; ++i) {
            if (l0 == 0) {
                if (found >= zeros.size() || zeros[found] != i)
                    throw internal_inconsistency_error(
                        "lucas_zeros: scan found an unlisted zero at p = " + std::to_string(p));
                ++found;
            }
            std::uint64_t next = (l0 + l1) % p;
            l0 = l1;
            l1 = next;
        }
        if (found != zeros.size())
            throw internal_inconsistency_error(
                "lucas_zeros: scan missed a listed zero at p = " + std::to_string(p));
    }
    return LucasZeroSet{p, zeros};
}

struct WallExponentRecord {
    std::uint64_t p;
    int e;
    int via_fib;
    std::optional<int> via_lucas;
    std::optional<int> via_padic;
    bool wall_sun_sun;
};

namespace detail {

// nu_p of a residue known mod p^cap; nullopt if the whole window vanishes.
inline std::optional<int> capped_valuation(const Integer& x, std::uint64_t p, int cap) {
    if (x == 0) return std::nullopt;
    Integer t = x;
    int v = 0;
    while (t % static_cast<unsigned long>(p) == 0 && v < cap) {
        t /= static_cast<unsigned long>(p);
        ++v;
    }
    return v;
}

} // namespace detail

inline WallExponentRecord wall_exponent(std::uint64_t p, int max_e = 8) {
    if (p == 5) throw std::invalid_argument("wall_exponent: p = 5 has epsilon = 0");
    if (max_e < 2) throw std::invalid_argument("wall_exponent: max_e must be >= 2");
    if (!is_prime_u64(p)) throw std::invalid_argument("wall_exponent: p must be prime");
    int eps = epsilon(p);
    std::uint64_t n = static_cast<std::uint64_t>(static_cast<std::int64_t>(p) - eps);
    Integer cap_mod = pow_u64(p, static_cast<unsigned long>(max_e));
    auto via_fib = detail::capped_valuation(fib_mod(n, cap_mod), p, max_e);
    if (!via_fib || *via_fib >= max_e) throw exponent_cap_error(p, max_e);
    WallExponentRecord rec;
    rec.p = p;
    rec.via_fib = *via_fib;
    rec.e = *via_fib;
    rec.wall_sun_sun = rec.e >= 2;
    if (p != 2 && p != 3) {
        LucasZeroSet zeros = lucas_zeros(p);
        if (!zeros.zeros.empty()) {
            auto vl = detail::capped_valuation(lucas_mod(zeros.zeros.front(), cap_mod), p, max_e);
            if (!vl) throw exponent_cap_error(p, max_e);
            rec.via_lucas = *vl;
        }
    }
    if (p != 2) {
        padic::Interpolator interp(p, rec.e + 2);
        padic::Valuation v = interp.unit_distance();
        if (v.infinite)
            throw internal_inconsistency_error(
                "wall_exponent: phi/omega(phi) - 1 vanishes to precision at p = " +
                std::to_string(p));
        rec.via_padic = v.value;
    }
    if ((rec.via_lucas && *rec.via_lucas != rec.e) ||
        (rec.via_padic && *rec.via_padic != rec.e))
        throw internal_inconsistency_error(
            "wall_exponent: channel disagreement at p = " + std::to_string(p));
    return rec;
}

// One pass of F(i) mod p^e over i < pi(p): N = distinct residues at Lucas
// non-zeros, Z = zeros whose residue avoids that set.
inline std::pair<std::uint64_t, std::uint64_t>
count_N_Z(std::uint64_t p, int e, const LucasZeroSet& zeros) {
    if (p == 2 || p == 5) throw std::invalid_argument("count_N_Z: p must not be 2 or 5");
    PeriodInfo info = period_info(p);
    Integer mod = pow_u64(p, static_cast<unsigned long>(e));
    std::set<Integer> nonzero_residues;
    std::vector<Integer> zero_residues;
    Integer a = 0, b = 1;
    std::size_t zi = 0;
    for (std::uint64_t i = 0; i < info.pi; ++i) {
        if (zi < zeros.zeros.size() && zeros.zeros[zi] == i) {
            zero_residues.push_back(a);
            ++zi;
        } else {
            nonzero_residues.insert(a);
        }
        Integer next = (a + b) % mod;
        a = b;
        b = next;
    }
    std::uint64_t Z = 0;
    for (const Integer& r : zero_residues)
        if (!nonzero_residues.count(r)) ++Z;
    return {nonzero_residues.size(), Z};
}

struct DensityReport {
    std::uint64_t p;
    int epsilon;
    std::uint64_t alpha;
    std::uint64_t pi;
    int e;
    LucasZeroSet lucas_zeros;
    std::uint64_t N;
    std::uint64_t Z;
    Rational dens;
    std::optional<std::string> special_case;
    WallExponentRecord wall;
};

inline DensityReport dens(std::uint64_t p, int max_e = 8) {
    if (!is_prime_u64(p)) throw std::invalid_argument("dens: p must be prime");
    DensityReport rep;
    rep.p = p;
    PeriodInfo info = period_info(p);
    rep.epsilon = info.epsilon;
    rep.alpha = info.alpha;
    rep.pi = info.pi;
    if (p == 2) {
        // pi(2) = 3, one Lucas zero at i = 0: N = |{F(1), F(2) mod 2}| = 1,
        // and F(0) = 0 avoids it, so Z = 1. The density comes from the
        // dedicated p = 2 analysis, not the generic formula.
        rep.e = 1;
        rep.lucas_zeros = LucasZeroSet{2, {0}};
        rep.N = 1;
        rep.Z = 1;
        rep.dens = make_rational(21, 32);
        rep.special_case = "p=2";
        rep.wall = WallExponentRecord{2, 1, 1, std::nullopt, std::nullopt, false};
        return rep;
    }
    if (p == 5) {
        // dens(5) = 1 by Burr; N(5) = 5, Z(5) = 0 reproduce the formula's
        // consistency check. The p-adic machinery is never engaged.
        rep.e = 1; // nu_5(F(5)) = nu_5(5)
        rep.lucas_zeros = LucasZeroSet{5, {}};
        rep.N = 5;
        rep.Z = 0;
        rep.dens = make_rational(1, 1);
        rep.special_case = "p=5";
        rep.wall = WallExponentRecord{5, 1, 1, std::nullopt, std::nullopt, false};
        return rep;
    }
    rep.wall = wall_exponent(p, max_e);
    rep.e = rep.wall.e;
    rep.lucas_zeros = lucas_zeros(p);
    auto [N, Z] = count_N_Z(p, rep.e, rep.lucas_zeros);
    rep.N = N;
    rep.Z = Z;
    Integer pe = pow_u64(p, static_cast<unsigned long>(rep.e));
    Integer pe2 = pow_u64(p, static_cast<unsigned long>(2 * rep.e - 1));
    rep.dens = make_rational(Integer(static_cast<unsigned long>(N)), pe) +
               make_rational(Integer(static_cast<unsigned long>(Z)),
                             2 * pe2 * Integer(static_cast<unsigned long>(p) + 1));
    if (p == 3) {
        rep.special_case = "p=3";
        if (rep.dens != 1)
            throw internal_inconsistency_error("dens: dens(3) must equal 1");
    }
    return rep;
}

// Warm-up calibration target: the measure of squares in Z_p.
inline Rational square_density(std::uint64_t p) {
    if (p == 2 || !is_prime_u64(p))
        throw std::invalid_argument("square_density: p must be an odd prime");
    return make_rational(Integer(static_cast<unsigned long>(p)),
                         2 * Integer(static_cast<unsigned long>(p) + 1));
}

inline nlohmann::json to_json(const DensityReport& rep) {
    nlohmann::json j;
    j["p"] = rep.p;
    j["epsilon"] = rep.epsilon;
    j["alpha"] = rep.alpha;
    j["pi"] = rep.pi;
    j["e"] = rep.e;
    j["lucas_zeros"] = rep.lucas_zeros.zeros;
    j["N"] = rep.N;
    j["Z"] = rep.Z;
    j["dens"] = {{"num", rep.dens.get_num().get_str()},
                 {"den", rep.dens.get_den().get_str()}};
    if (rep.special_case) j["special_case"] = *rep.special_case;
    nlohmann::json w;
    w["via_fib"] = rep.wall.via_fib;
    if (rep.wall.via_lucas) w["via_lucas"] = *rep.wall.via_lucas;
    if (rep.wall.via_padic) w["via_padic"] = *rep.wall.via_padic;
    w["wall_sun_sun"] = rep.wall.wall_sun_sun;
    j["wall_exponent"] = w;
    return j;
}

} // namespace fibdens
