#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fibdens/density.hpp"
#include "fibdens/errors.hpp"
#include "fibdens/modfib.hpp"
#include "fibdens/padic.hpp"
#include "fibdens/primes.hpp"
#include "fibdens/rational.hpp"

namespace fibdens {

constexpr std::uint64_t kDefaultEnumerationBudget = 100000000ULL;

// Partial-branching data below a Lucas zero i: the digits of
// c_i = omega(phi)^i * 2/sqrt5 and the quadratic-residue gate zeta*sqrt5.
struct BranchRule {
    std::uint64_t p;
    std::uint64_t i;
    std::uint64_t zeta_sqrt5_mod_p;
    std::vector<unsigned> c_digits;
    std::vector<bool> qr_set; // membership table over residues mod p
};

inline BranchRule branch_rule(std::uint64_t p, std::uint64_t i, int depth) {
    if (p == 2 || p == 5)
        throw std::invalid_argument("branch_rule: p must be an odd prime != 5");
    // Guard digits for the division by sqrt5 and the Teichmuller power.
    padic::Interpolator interp(p, depth + 2);
    BranchRule rule;
    rule.p = p;
    rule.i = i;
    rule.zeta_sqrt5_mod_p = interp.zeta_sqrt5_mod_p(i);
    Integer c = interp.branch_center(i, depth);
    rule.c_digits.reserve(depth);
    Integer t = c;
    for (int k = 0; k < depth; ++k) {
        rule.c_digits.push_back(
            static_cast<unsigned>(Integer(t % static_cast<unsigned long>(p)).get_ui()));
        t /= static_cast<unsigned long>(p);
    }
    rule.qr_set = quadratic_residues(p);
    return rule;
}

enum class AttainedForm { Explicit, Compressed };

struct SubtreeRef {
    int level;             // even level lambda' with a full subtree below
    unsigned offset_digit; // j with zeta*sqrt5*j a quadratic residue
};

struct ZeroBranch {
    std::uint64_t i;              // Lucas zero index
    std::vector<unsigned> path;   // digits of c_i, least significant first
    std::vector<SubtreeRef> subtrees;
};

// Residues mod p^lambda attained by the Fibonacci sequence, either as an
// explicit sorted list or as cylinders plus Lucas-zero branch data.
struct AttainedSet {
    std::uint64_t p;
    int lambda;
    int e = 1;
    AttainedForm form;
    std::vector<std::uint64_t> residues;   // Explicit
    std::vector<std::uint64_t> cylinders;  // Compressed: roots mod p^e
    std::vector<ZeroBranch> zeros;         // Compressed
};

namespace detail {

inline std::uint64_t checked_pow_u64(std::uint64_t base, int exp) {
    Integer m = pow_u64(base, static_cast<unsigned long>(exp));
    if (!m.fits_ulong_p())
        throw resource_error("modulus p^lambda exceeds 64 bits");
    return m.get_ui();
}

} // namespace detail

// Enumerate F(n) mod p^lambda over one full period. The period is taken
// as p^(lambda-1) * pi(p) and verified by the return to (0, 1); if a
// Wall-Sun-Sun prime ever makes it smaller, the verification still holds
// because the true period divides the candidate.
inline AttainedSet brute_attained(std::uint64_t p, int lambda,
                                  std::uint64_t budget = kDefaultEnumerationBudget) {
    if (!is_prime_u64(p)) throw std::invalid_argument("brute_attained: p must be prime");
    if (lambda < 0) throw std::invalid_argument("brute_attained: lambda must be >= 0");
    AttainedSet set;
    set.p = p;
    set.lambda = lambda;
    set.form = AttainedForm::Explicit;
    if (lambda == 0) {
        set.residues = {0};
        return set;
    }
    PeriodInfo info = period_info(p);
    Integer steps_big = pow_u64(p, static_cast<unsigned long>(lambda - 1)) *
                        Integer(static_cast<unsigned long>(info.pi));
    if (steps_big > Integer(static_cast<unsigned long>(budget)))
        throw resource_error("brute_attained: enumeration needs " + steps_big.get_str() +
                             " steps, budget is " + std::to_string(budget));
    std::uint64_t steps = steps_big.get_ui();
    std::uint64_t mod = detail::checked_pow_u64(p, lambda);
    std::uint64_t a = 0, b = 1;
    // If the verification ever fails (it cannot, since the true period
    // divides the candidate), keep walking until F returns to (0, 1).
    auto walk = [&](auto&& record) {
        for (std::uint64_t s = 0; s < steps; ++s) {
            record(a);
            std::uint64_t next = a + b;
            if (next >= mod) next -= mod;
            a = b;
            b = next;
        }
        std::uint64_t extra = 0;
        while (a != 0 || b != 1) {
            if (++extra > budget)
                throw resource_error("brute_attained: period search exceeded budget");
            record(a);
            std::uint64_t next = a + b;
            if (next >= mod) next -= mod;
            a = b;
            b = next;
        }
    };
    if (mod <= (1ULL << 32)) {
        std::vector<bool> seen(mod, false);
        walk([&](std::uint64_t r) { seen[r] = true; });
        for (std::uint64_t r = 0; r < mod; ++r)
            if (seen[r]) set.residues.push_back(r);
    } else {
        std::vector<std::uint64_t> hits;
        hits.reserve(steps);
        walk([&](std::uint64_t r) { hits.push_back(r); });
        std::sort(hits.begin(), hits.end());
        hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
        set.residues = std::move(hits);
    }
    return set;
}

inline Rational level_density(std::uint64_t p, int lambda,
                              std::uint64_t budget = kDefaultEnumerationBudget) {
    AttainedSet set = brute_attained(p, lambda, budget);
    return make_rational(Integer(static_cast<unsigned long>(set.residues.size())),
                         pow_u64(p, static_cast<unsigned long>(lambda)));
}

// Compressed attained set: full cylinders at the Lucas non-zero residues
// mod p^e, plus for each surviving Lucas zero the digit path of c_i and
// full subtrees at quadratic-residue offsets on even levels >= 2e.
inline AttainedSet fast_attained(std::uint64_t p, int lambda) {
    if (p == 2 || p == 5)
        throw std::invalid_argument("fast_attained: p = 2 and p = 5 are brute-force only");
    if (!is_prime_u64(p)) throw std::invalid_argument("fast_attained: p must be prime");
    DensityReport rep = dens(p);
    AttainedSet set;
    set.p = p;
    set.lambda = lambda;
    set.e = rep.e;
    set.form = AttainedForm::Compressed;
    if (lambda == 0) return set;

    // One pass over the period mod p^e classifies residues.
    Integer mod_e = pow_u64(p, static_cast<unsigned long>(rep.e));
    std::set<Integer> cyl;
    std::map<std::uint64_t, Integer> zero_residue;
    {
        Integer a = 0, b = 1;
        std::size_t zi = 0;
        for (std::uint64_t i = 0; i < rep.pi; ++i) {
            if (zi < rep.lucas_zeros.zeros.size() && rep.lucas_zeros.zeros[zi] == i) {
                zero_residue[i] = a;
                ++zi;
            } else {
                cyl.insert(a);
            }
            Integer next = (a + b) % mod_e;
            a = b;
            b = next;
        }
    }
    for (const Integer& r : cyl) set.cylinders.push_back(r.get_ui());

    for (auto& [i, res] : zero_residue) {
        if (cyl.count(res)) continue; // swallowed by a full cylinder
        BranchRule rule = branch_rule(p, i, lambda);
        ZeroBranch zb;
        zb.i = i;
        zb.path = rule.c_digits;
        for (int lvl = 2 * rep.e; lvl < lambda; lvl += 2) {
            for (std::uint64_t j = 1; j < p; ++j) {
                if (rule.qr_set[mulmod_u64(rule.zeta_sqrt5_mod_p, j, p)])
                    zb.subtrees.push_back(SubtreeRef{lvl, static_cast<unsigned>(j)});
            }
        }
        set.zeros.push_back(std::move(zb));
    }
    return set;
}

// Expand a set to the explicit sorted residue list mod p^lambda.
inline std::vector<std::uint64_t> expand(const AttainedSet& set,
                                         std::uint64_t max_size = kDefaultEnumerationBudget) {
    if (set.form == AttainedForm::Explicit) return set.residues;
    std::uint64_t p = set.p;
    int lambda = set.lambda;
    if (lambda == 0) return {0};
    std::uint64_t mod = detail::checked_pow_u64(p, lambda);
    std::vector<bool> seen(mod, false);
    std::uint64_t count = 0;
    auto mark = [&](std::uint64_t r) {
        if (!seen[r]) { seen[r] = true; ++count; }
        if (count > max_size) throw resource_error("expand: explicit set exceeds budget");
    };
    int e = set.e;
    if (lambda <= e) {
        std::uint64_t mod_l = mod;
        for (std::uint64_t root : set.cylinders) mark(root % mod_l);
        for (const ZeroBranch& zb : set.zeros) {
            std::uint64_t r = 0, pk = 1;
            for (int k = 0; k < lambda; ++k) { r += zb.path[k] * pk; pk *= p; }
            mark(r);
        }
    } else {
        std::uint64_t mod_e = detail::checked_pow_u64(p, e);
        std::uint64_t blocks = mod / mod_e;
        for (std::uint64_t root : set.cylinders)
            for (std::uint64_t k = 0; k < blocks; ++k) mark(root + k * mod_e);
        for (const ZeroBranch& zb : set.zeros) {
            // Path node at full depth.
            std::uint64_t path_mod = 0, pk = 1;
            std::vector<std::uint64_t> prefix(lambda + 1); // c_i mod p^k
            prefix[0] = 0;
            for (int k = 0; k < lambda; ++k) {
                path_mod += static_cast<std::uint64_t>(zb.path[k]) * pk;
                pk *= p;
                prefix[k + 1] = path_mod;
            }
            mark(path_mod);
            for (const SubtreeRef& st : zb.subtrees) {
                // Everything congruent to c_i + j p^l mod p^(l+1); the stored
                // offset j is relative to the path digit.
                std::uint64_t pl = detail::checked_pow_u64(p, st.level);
                std::uint64_t digit = (zb.path[st.level] + st.offset_digit) % p;
                std::uint64_t root = prefix[st.level] + digit * pl;
                std::uint64_t mod_l1 = pl * p;
                for (std::uint64_t k = 0; k < mod / mod_l1; ++k)
                    mark(root + k * mod_l1);
            }
        }
    }
    std::vector<std::uint64_t> out;
    out.reserve(count);
    for (std::uint64_t r = 0; r < mod; ++r)
        if (seen[r]) out.push_back(r);
    return out;
}

inline Rational compressed_density(const AttainedSet& set) {
    if (set.form != AttainedForm::Compressed)
        throw std::invalid_argument("compressed_density: set must be compressed");
    return make_rational(
        Integer(static_cast<unsigned long>(expand(set).size())),
        pow_u64(set.p, static_cast<unsigned long>(set.lambda)));
}

namespace detail {

inline std::string base_p_name(std::uint64_t r, std::uint64_t p, int level) {
    if (level == 0) return "root";
    std::vector<std::uint64_t> digits(level);
    for (int k = 0; k < level; ++k) { digits[k] = r % p; r /= p; }
    std::string s;
    for (int k = level - 1; k >= 0; --k) {
        if (!s.empty()) s += '.';
        s += std::to_string(digits[k]);
    }
    return s;
}

} // namespace detail

// DOT digraph of the tree of attained residues. Node names render the
// residue in base p, most significant digit first; full-subtree markers
// use dotted edges, matching the figure convention.
inline std::string export_dot(const AttainedSet& set, std::uint64_t node_cap = 100000) {
    std::uint64_t p = set.p;
    std::ostringstream out;
    out << "digraph attained {\n";
    out << "  label=\"residues attained mod " << p << "^" << set.lambda << "\";\n";
    out << "  node [shape=box];\n";
    if (set.form == AttainedForm::Explicit) {
        if (set.residues.size() * static_cast<std::uint64_t>(set.lambda + 1) > node_cap)
            throw resource_error("export_dot: explicit tree too large; use the compressed form");
        // Distinct prefixes per level, children ordered by digit.
        std::set<std::pair<int, std::uint64_t>> nodes;
        nodes.insert({0, 0});
        std::uint64_t pk = 1;
        for (int level = 1; level <= set.lambda; ++level) {
            pk *= p;
            for (std::uint64_t r : set.residues) nodes.insert({level, r % pk});
        }
        for (auto& [level, r] : nodes) {
            out << "  \"" << level << ":" << detail::base_p_name(r, p, level) << "\";\n";
        }
        for (auto& [level, r] : nodes) {
            if (level == 0) continue;
            std::uint64_t parent_mod = 1;
            for (int k = 0; k < level - 1; ++k) parent_mod *= p;
            std::uint64_t parent = r % parent_mod;
            std::uint64_t digit = (r / parent_mod) % p;
            out << "  \"" << (level - 1) << ":"
                << detail::base_p_name(parent, p, level - 1) << "\" -> \"" << level << ":"
                << detail::base_p_name(r, p, level) << "\" [label=\"" << digit << "\"];\n";
        }
    } else {
        int e = set.e;
        // Cylinder roots: the path down to level e, then a dotted full-tree marker.
        auto emit_path = [&](std::uint64_t value, int depth) {
            std::uint64_t pk = 1;
            for (int level = 1; level <= depth; ++level) {
                std::uint64_t parent = value % pk;
                pk *= p;
                std::uint64_t node = value % pk;
                std::uint64_t digit = (node / (pk / p)) % p;
                out << "  \"" << (level - 1) << ":"
                    << detail::base_p_name(parent, p, level - 1) << "\" -> \"" << level
                    << ":" << detail::base_p_name(node, p, level) << "\" [label=\"" << digit
                    << "\"];\n";
            }
        };
        for (std::uint64_t root : set.cylinders) {
            int depth = std::min(e, set.lambda);
            emit_path(root, depth);
            if (set.lambda > e) {
                out << "  \"" << e << ":" << detail::base_p_name(root, p, e)
                    << "\" -> \"full:" << detail::base_p_name(root, p, e)
                    << "\" [style=dotted];\n";
                out << "  \"full:" << detail::base_p_name(root, p, e)
                    << "\" [label=\"full " << p << "-ary\", shape=plaintext];\n";
            }
        }
        for (const ZeroBranch& zb : set.zeros) {
            std::uint64_t path_val = 0, pk = 1;
            for (int k = 0; k < set.lambda; ++k) {
                path_val += static_cast<std::uint64_t>(zb.path[k]) * pk;
                pk *= p;
            }
            emit_path(path_val, set.lambda);
            for (const SubtreeRef& st : zb.subtrees) {
                std::uint64_t pl = detail::checked_pow_u64(p, st.level);
                std::uint64_t parent = path_val % pl;
                std::uint64_t digit = (zb.path[st.level] + st.offset_digit) % p;
                std::uint64_t node = parent + digit * pl;
                out << "  \"" << st.level << ":" << detail::base_p_name(parent, p, st.level)
                    << "\" -> \"" << (st.level + 1) << ":"
                    << detail::base_p_name(node, p, st.level + 1) << "\" [label=\""
                    << digit << "\", style=dotted];\n";
            }
        }
    }
    out << "}\n";
    return out.str();
}

inline nlohmann::json to_json(const AttainedSet& set) {
    nlohmann::json j;
    j["p"] = set.p;
    j["lambda"] = set.lambda;
    j["e"] = set.e;
    if (set.form == AttainedForm::Explicit) {
        j["form"] = "explicit";
        std::vector<std::string> res;
        res.reserve(set.residues.size());
        for (std::uint64_t r : set.residues) res.push_back(std::to_string(r));
        j["residues"] = res;
    } else {
        j["form"] = "compressed";
        std::vector<std::string> cyl;
        for (std::uint64_t r : set.cylinders) cyl.push_back(std::to_string(r));
        j["cylinders"] = cyl;
        nlohmann::json zeros = nlohmann::json::array();
        for (const ZeroBranch& zb : set.zeros) {
            nlohmann::json z;
            z["i"] = zb.i;
            z["path"] = zb.path;
            nlohmann::json subs = nlohmann::json::array();
            for (const SubtreeRef& st : zb.subtrees)
                subs.push_back({{"level", st.level}, {"offset_digit", st.offset_digit}});
            z["subtrees"] = subs;
            zeros.push_back(z);
        }
        j["zeros"] = zeros;
    }
    return j;
}

inline AttainedSet attained_from_json(const nlohmann::json& j) {
    AttainedSet set;
    set.p = j.at("p").get<std::uint64_t>();
    set.lambda = j.at("lambda").get<int>();
    set.e = j.at("e").get<int>();
    if (j.at("form") == "explicit") {
        set.form = AttainedForm::Explicit;
        for (const auto& s : j.at("residues"))
            set.residues.push_back(std::stoull(s.get<std::string>()));
    } else {
        set.form = AttainedForm::Compressed;
        for (const auto& s : j.at("cylinders"))
            set.cylinders.push_back(std::stoull(s.get<std::string>()));
        for (const auto& z : j.at("zeros")) {
            ZeroBranch zb;
            zb.i = z.at("i").get<std::uint64_t>();
            zb.path = z.at("path").get<std::vector<unsigned>>();
            for (const auto& st : z.at("subtrees"))
                zb.subtrees.push_back(SubtreeRef{st.at("level").get<int>(),
                                                 st.at("offset_digit").get<unsigned>()});
            set.zeros.push_back(std::move(zb));
        }
    }
    return set;
}

// Brute-force squares mod p^lambda, the calibration twin of brute_attained.
inline std::vector<std::uint64_t> brute_squares(std::uint64_t p, int lambda,
                                                std::uint64_t budget = kDefaultEnumerationBudget) {
    std::uint64_t mod = detail::checked_pow_u64(p, lambda);
    if (mod > budget) throw resource_error("brute_squares: budget exceeded");
    std::vector<bool> seen(mod, false);
    for (std::uint64_t x = 0; x < mod; ++x) seen[mulmod_u64(x, x, mod)] = true;
    std::vector<std::uint64_t> out;
    for (std::uint64_t r = 0; r < mod; ++r)
        if (seen[r]) out.push_back(r);
    return out;
}

// Closed-form count of squares mod p^lambda: 1 (for zero) plus the
// quadratic-residue cylinders on even valuations below lambda.
inline Integer square_count_closed_form(std::uint64_t p, int lambda) {
    Integer count = 1;
    for (int v = 0; v < lambda; v += 2)
        count += Integer(static_cast<unsigned long>((p - 1) / 2)) *
                 pow_u64(p, static_cast<unsigned long>(lambda - v - 1));
    return count;
}

} // namespace fibdens
