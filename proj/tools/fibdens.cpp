#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "fibdens/density.hpp"
#include "fibdens/modfib.hpp"
#include "fibdens/padic.hpp"
#include "fibdens/scan.hpp"
#include "fibdens/tree.hpp"

namespace {

using namespace fibdens;

std::string dens_string(const Rational& q, bool as_float) {
    std::string s = rational_to_string(q);
    if (as_float) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.15g", q.get_d());
        s += " (";
        s += buf;
        s += ")";
    }
    return s;
}

void print_report(const DensityReport& rep, bool json_mode, bool as_float) {
    if (json_mode) {
        std::cout << to_json(rep).dump(2) << "\n";
        return;
    }
    std::cout << "p = " << rep.p << "\n";
    std::cout << "epsilon = " << rep.epsilon << ", alpha = " << rep.alpha
              << ", pi = " << rep.pi << ", e = " << rep.e << "\n";
    std::cout << "Lucas zeros = {";
    for (std::size_t i = 0; i < rep.lucas_zeros.zeros.size(); ++i)
        std::cout << (i ? ", " : "") << rep.lucas_zeros.zeros[i];
    std::cout << "}\n";
    std::cout << "N = " << rep.N << ", Z = " << rep.Z << "\n";
    std::cout << "dens = " << dens_string(rep.dens, as_float) << "\n";
    if (rep.special_case) std::cout << "special case: " << *rep.special_case << "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"Limiting density of the Fibonacci sequence modulo prime powers"};
    app.require_subcommand(1);
    bool json_mode = false;
    bool as_float = false;
    app.add_flag("--json", json_mode, "emit JSON instead of text");
    app.add_flag("--float", as_float, "append 15-digit decimals to exact rationals");

    std::uint64_t arg_p = 0, arg_lo = 0, arg_hi = 0, arg_n = 0, arg_i = 0;
    int level = 1, prec = 8, depth = 8, max_e = 8;
    unsigned workers = 1;
    std::string resume_file, csv_path, jsonl_path, checkpoint_path;
    bool fast = false, brute = false, dot = false;

    auto* cmd_dens = app.add_subcommand("dens", "density report for one prime");
    cmd_dens->add_option("p", arg_p, "prime")->required();
    cmd_dens->add_option("--max-e", max_e, "Wall exponent cap");

    auto* cmd_table = app.add_subcommand("table", "density table for primes up to a bound");
    std::uint64_t upto = 43;
    cmd_table->add_option("--upto", upto, "inclusive upper bound")->required();

    auto* cmd_tree = app.add_subcommand("tree", "tree of attained residues");
    cmd_tree->add_option("p", arg_p, "prime")->required();
    cmd_tree->add_option("--level", level, "depth lambda")->required();
    cmd_tree->add_flag("--fast", fast, "compressed construction (default)");
    cmd_tree->add_flag("--brute", brute, "brute-force enumeration");
    cmd_tree->add_flag("--dot", dot, "DOT output (default is JSON)");

    auto* cmd_verify = app.add_subcommand("verify", "fast vs brute equivalence");
    cmd_verify->add_option("p", arg_p, "prime")->required();
    cmd_verify->add_option("--level", level, "depth lambda")->required();

    auto* cmd_interp = app.add_subcommand("interp", "interpolated F_i(n) vs exact F(n)");
    cmd_interp->add_option("p", arg_p, "prime")->required();
    cmd_interp->add_option("n", arg_n, "index")->required();
    cmd_interp->add_option("--prec", prec, "p-adic digits");

    auto* cmd_digits = app.add_subcommand("digits", "digits of omega(phi)^i * 2/sqrt5");
    cmd_digits->add_option("p", arg_p, "prime")->required();
    cmd_digits->add_option("i", arg_i, "Lucas zero index")->required();
    cmd_digits->add_option("--depth", depth, "digit count");

    auto* cmd_scan = app.add_subcommand("scan", "density scan over a prime range");
    cmd_scan->add_option("lo", arg_lo, "range start")->required();
    cmd_scan->add_option("hi", arg_hi, "range end")->required();
    cmd_scan->add_option("--resume", resume_file, "checkpoint file to resume from");
    cmd_scan->add_option("--csv", csv_path, "CSV output path (default stdout)");
    cmd_scan->add_option("--jsonl", jsonl_path, "JSON-lines output path");
    cmd_scan->add_option("--checkpoint", checkpoint_path, "checkpoint file to maintain");
    cmd_scan->add_option("--workers", workers, "worker threads");

    auto* cmd_wss = app.add_subcommand("wss", "Wall-Sun-Sun sweep");
    cmd_wss->add_option("lo", arg_lo, "range start")->required();
    cmd_wss->add_option("hi", arg_hi, "range end")->required();

    auto* cmd_square = app.add_subcommand("square-cal", "squares-measure calibration");
    cmd_square->add_option("p", arg_p, "odd prime")->required();
    cmd_square->add_option("--level", level, "depth lambda")->required();

    CLI11_PARSE(app, argc, argv);

    if (cmd_dens->parsed()) {
        print_report(dens(arg_p, max_e), json_mode, as_float);
    } else if (cmd_table->parsed()) {
        nlohmann::json rows = nlohmann::json::array();
        for (std::uint64_t p : primes_in_range(2, upto)) {
            DensityReport rep = dens(p);
            if (json_mode) {
                rows.push_back(to_json(rep));
            } else {
                std::cout << p << "\t" << dens_string(rep.dens, as_float) << "\n";
            }
        }
        if (json_mode) std::cout << rows.dump(2) << "\n";
    } else if (cmd_tree->parsed()) {
        if (fast && brute) throw CLI::ValidationError("tree", "--fast and --brute conflict");
        AttainedSet set = brute ? brute_attained(arg_p, level) : fast_attained(arg_p, level);
        if (dot) {
            std::cout << export_dot(set);
        } else {
            std::cout << to_json(set).dump(2) << "\n";
        }
    } else if (cmd_verify->parsed()) {
        AttainedSet fast_set = fast_attained(arg_p, level);
        AttainedSet brute_set = brute_attained(arg_p, level);
        bool equal = expand(fast_set) == brute_set.residues;
        Rational density = make_rational(
            Integer(static_cast<unsigned long>(brute_set.residues.size())),
            pow_u64(arg_p, static_cast<unsigned long>(level)));
        if (json_mode) {
            nlohmann::json j;
            j["p"] = arg_p;
            j["lambda"] = level;
            j["equal"] = equal;
            j["density"] = {{"num", density.get_num().get_str()},
                            {"den", density.get_den().get_str()}};
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << (equal ? "EQUAL" : "MISMATCH") << ", density "
                      << dens_string(density, as_float) << "\n";
        }
        if (!equal)
            throw internal_inconsistency_error("verify: fast and brute sets differ");
    } else if (cmd_interp->parsed()) {
        Integer expected = fib_mod(arg_n, pow_u64(arg_p, static_cast<unsigned long>(prec)));
        Integer got;
        if (arg_p == 2) {
            padic::Interpolator2 interp(prec + 6);
            got = interp.interp_at(arg_n, prec);
        } else {
            padic::Interpolator interp(arg_p, prec + 4);
            got = interp.interp_value(arg_n % interp.period().pi,
                                      Integer(static_cast<unsigned long>(arg_n)), prec);
        }
        bool match = got == expected;
        if (json_mode) {
            nlohmann::json j;
            j["p"] = arg_p;
            j["n"] = arg_n;
            j["prec"] = prec;
            j["interpolated"] = got.get_str();
            j["exact"] = expected.get_str();
            j["match"] = match;
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << "F_" << (arg_p == 2 ? arg_n % 3 : arg_n) << "(" << arg_n
                      << ") mod " << arg_p << "^" << prec << " = " << got
                      << "  exact = " << expected << (match ? "  OK" : "  MISMATCH") << "\n";
        }
        if (!match)
            throw internal_inconsistency_error("interp: interpolation disagrees with F(n)");
    } else if (cmd_digits->parsed()) {
        BranchRule rule = branch_rule(arg_p, arg_i, depth);
        if (json_mode) {
            nlohmann::json j;
            j["p"] = arg_p;
            j["i"] = arg_i;
            j["digits"] = rule.c_digits;
            j["zeta_sqrt5_mod_p"] = rule.zeta_sqrt5_mod_p;
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << padic::render_digits(rule.c_digits) << "\n";
        }
    } else if (cmd_scan->parsed()) {
        ScanOptions opts;
        opts.workers = workers;
        std::ofstream csv_out, jsonl_out;
        if (!csv_path.empty()) {
            bool resuming = !resume_file.empty();
            csv_out.open(csv_path, resuming ? std::ios::app : std::ios::trunc);
            opts.csv = &csv_out;
            opts.csv_header = !resuming;
        } else {
            opts.csv = &std::cout;
        }
        if (!jsonl_path.empty()) {
            jsonl_out.open(jsonl_path, resume_file.empty() ? std::ios::trunc : std::ios::app);
            opts.jsonl = &jsonl_out;
        }
        if (!resume_file.empty()) {
            ScanCheckpoint cp = read_checkpoint(resume_file);
            opts.resume_after = cp.last_completed_prime;
            opts.checkpoint_path = resume_file;
        } else if (!checkpoint_path.empty()) {
            opts.checkpoint_path = checkpoint_path;
        }
        ScanSummary summary = scan_range(arg_lo, arg_hi, opts);
        std::cerr << "scanned " << summary.count << " primes";
        if (summary.min_dens)
            std::cerr << ", min dens at p = " << summary.min_dens->first << ": "
                      << rational_to_string(summary.min_dens->second);
        if (!summary.wss_hits.empty()) std::cerr << ", WALL-SUN-SUN HITS PRESENT";
        std::cerr << "\n";
    } else if (cmd_wss->parsed()) {
        std::vector<std::uint64_t> hits = wss_sweep(arg_lo, arg_hi);
        if (json_mode) {
            std::cout << nlohmann::json(hits).dump() << "\n";
        } else if (hits.empty()) {
            std::cout << "no Wall-Sun-Sun primes in [" << arg_lo << ", " << arg_hi << "]\n";
        } else {
            for (std::uint64_t p : hits) std::cout << p << "\n";
        }
    } else if (cmd_square->parsed()) {
        Rational target = square_density(arg_p);
        Rational level_val = make_rational(
            Integer(static_cast<unsigned long>(brute_squares(arg_p, level).size())),
            pow_u64(arg_p, static_cast<unsigned long>(level)));
        Rational closed = make_rational(square_count_closed_form(arg_p, level),
                                        pow_u64(arg_p, static_cast<unsigned long>(level)));
        bool ok = level_val == closed && level_val >= target;
        if (json_mode) {
            nlohmann::json j;
            j["p"] = arg_p;
            j["lambda"] = level;
            j["level_density"] = rational_to_string(level_val);
            j["closed_form"] = rational_to_string(closed);
            j["limit"] = rational_to_string(target);
            j["ok"] = ok;
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << "squares mod " << arg_p << "^" << level << ": density "
                      << dens_string(level_val, as_float) << ", closed form "
                      << rational_to_string(closed) << ", limit "
                      << rational_to_string(target) << (ok ? "  OK" : "  MISMATCH") << "\n";
        }
        if (!ok)
            throw internal_inconsistency_error("square-cal: calibration mismatch");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const fibdens::internal_inconsistency_error& ex) {
        std::cerr << "internal inconsistency: " << ex.what() << "\n";
        return 3;
    } catch (const fibdens::resource_error& ex) {
        std::cerr << "resource limit: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}
