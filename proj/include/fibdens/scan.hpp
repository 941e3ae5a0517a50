#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fibdens/density.hpp"
#include "fibdens/errors.hpp"
#include "fibdens/primes.hpp"
#include "fibdens/rational.hpp"

namespace fibdens {

struct ScanRecord {
    std::uint64_t p;
    Rational dens;
    int e;
    std::uint64_t N;
    std::uint64_t Z;
    std::uint64_t alpha;
    std::uint64_t pi;
    std::int64_t ms;
    std::optional<std::string> error; // exponent-cap events, recorded per prime
};

struct ScanSummary {
    std::uint64_t count = 0;
    std::optional<std::pair<std::uint64_t, Rational>> min_dens;
    std::optional<std::pair<std::uint64_t, Rational>> max_dens;
    std::vector<std::uint64_t> wss_hits; // primes with e >= 2
    std::uint64_t errors = 0;
};

struct ScanOptions {
    std::ostream* csv = nullptr;
    std::ostream* jsonl = nullptr;
    std::string checkpoint_path;
    std::uint64_t resume_after = 0; // skip primes <= this
    unsigned workers = 1;
    std::uint64_t checkpoint_every = 256;
    bool csv_header = true;
    bool float_column = true;
};

inline std::string csv_header_line() {
    return "p,dens_num,dens_den,dens_float,e,N,Z,alpha,pi,ms";
}

inline std::string csv_line(const ScanRecord& r, bool float_column = true) {
    std::string fl;
    if (float_column) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.15g", r.dens.get_d());
        fl = buf;
    }
    return std::to_string(r.p) + "," + r.dens.get_num().get_str() + "," +
           r.dens.get_den().get_str() + "," + fl + "," + std::to_string(r.e) + "," +
           std::to_string(r.N) + "," + std::to_string(r.Z) + "," +
           std::to_string(r.alpha) + "," + std::to_string(r.pi) + "," +
           std::to_string(r.ms);
}

inline nlohmann::json to_json(const ScanRecord& r) {
    nlohmann::json j;
    j["p"] = r.p;
    j["dens"] = {{"num", r.dens.get_num().get_str()}, {"den", r.dens.get_den().get_str()}};
    j["e"] = r.e;
    j["N"] = r.N;
    j["Z"] = r.Z;
    j["alpha"] = r.alpha;
    j["pi"] = r.pi;
    j["ms"] = r.ms;
    if (r.error) j["error"] = *r.error;
    return j;
}

namespace detail {

// Atomic checkpoint write: temp file, then rename.
inline void write_checkpoint(const std::string& path, std::uint64_t lo, std::uint64_t hi,
                             std::uint64_t last_prime, std::uint64_t record_count,
                             const std::optional<std::pair<std::uint64_t, Rational>>& min_dens) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["range"] = {lo, hi};
    j["last_completed_prime"] = last_prime;
    j["record_count"] = record_count;
    if (min_dens)
        j["running_min"] = {{"p", min_dens->first},
                            {"num", min_dens->second.get_num().get_str()},
                            {"den", min_dens->second.get_den().get_str()}};
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw resource_error("checkpoint: cannot open " + tmp);
        out << j.dump() << "\n";
    }
    std::filesystem::rename(tmp, path);
}

inline ScanRecord compute_record(std::uint64_t p, int max_e) {
    auto t0 = std::chrono::steady_clock::now();
    ScanRecord rec;
    rec.p = p;
    try {
        DensityReport rep = dens(p, max_e);
        rec.dens = rep.dens;
        rec.e = rep.e;
        rec.N = rep.N;
        rec.Z = rep.Z;
        rec.alpha = rep.alpha;
        rec.pi = rep.pi;
    } catch (const exponent_cap_error& ex) {
        rec.dens = 0;
        rec.e = -1;
        rec.N = rec.Z = 0;
        PeriodInfo info = period_info(p);
        rec.alpha = info.alpha;
        rec.pi = info.pi;
        rec.error = ex.what();
    }
    auto t1 = std::chrono::steady_clock::now();
    rec.ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    return rec;
}

} // namespace detail

struct ScanCheckpoint {
    std::uint64_t lo = 0, hi = 0;
    std::uint64_t last_completed_prime = 0;
    std::uint64_t record_count = 0;
    std::optional<std::pair<std::uint64_t, Rational>> running_min;
};

inline ScanCheckpoint read_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw resource_error("checkpoint: cannot open " + path);
    nlohmann::json j;
    in >> j;
    if (j.at("schema_version").get<int>() != 1)
        throw resource_error("checkpoint: unsupported schema version");
    ScanCheckpoint cp;
    cp.lo = j.at("range")[0].get<std::uint64_t>();
    cp.hi = j.at("range")[1].get<std::uint64_t>();
    cp.last_completed_prime = j.at("last_completed_prime").get<std::uint64_t>();
    cp.record_count = j.at("record_count").get<std::uint64_t>();
    if (j.contains("running_min")) {
        const auto& m = j.at("running_min");
        cp.running_min = {m.at("p").get<std::uint64_t>(),
                          make_rational(Integer(m.at("num").get<std::string>()),
                                        Integer(m.at("den").get<std::string>()))};
    }
    return cp;
}

// Density records for every prime in [lo, hi], emitted in ascending prime
// order regardless of worker count. A single writer owns the sinks and
// the checkpoint; workers only fill result slots.
inline ScanSummary scan_range(std::uint64_t lo, std::uint64_t hi, const ScanOptions& opts,
                              int max_e = 8) {
    if (lo > hi) throw std::invalid_argument("scan_range: lo must be <= hi");
    std::vector<std::uint64_t> primes = primes_in_range(lo, hi);
    std::erase_if(primes, [&](std::uint64_t p) { return p <= opts.resume_after; });

    std::vector<ScanRecord> results(primes.size());
    std::vector<std::atomic<bool>> done(primes.size());
    std::atomic<std::size_t> next{0};

    unsigned workers = std::max(1u, opts.workers);
    auto work = [&]() {
        for (;;) {
            std::size_t idx = next.fetch_add(1);
            if (idx >= primes.size()) return;
            results[idx] = detail::compute_record(primes[idx], max_e);
            done[idx].store(true, std::memory_order_release);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);

    ScanSummary summary;
    if (opts.csv && opts.csv_header) *opts.csv << csv_header_line() << "\n";
    std::size_t emitted = 0;
    std::uint64_t since_checkpoint = 0;
    auto emit_ready = [&](bool blocking) {
        while (emitted < primes.size()) {
            if (!done[emitted].load(std::memory_order_acquire)) {
                if (!blocking) return;
                std::this_thread::yield();
                continue;
            }
            const ScanRecord& rec = results[emitted];
            if (opts.csv) *opts.csv << csv_line(rec, opts.float_column) << "\n";
            if (opts.jsonl) *opts.jsonl << to_json(rec).dump() << "\n";
            if (rec.error) {
                ++summary.errors;
            } else {
                if (!summary.min_dens || rec.dens < summary.min_dens->second)
                    summary.min_dens = {rec.p, rec.dens};
                if (!summary.max_dens || rec.dens > summary.max_dens->second)
                    summary.max_dens = {rec.p, rec.dens};
                if (rec.e >= 2) summary.wss_hits.push_back(rec.p);
            }
            ++summary.count;
            ++emitted;
            if (!opts.checkpoint_path.empty() && ++since_checkpoint >= opts.checkpoint_every) {
                since_checkpoint = 0;
                detail::write_checkpoint(opts.checkpoint_path, lo, hi, rec.p,
                                         summary.count, summary.min_dens);
            }
        }
    };
    // The calling thread doubles as a worker while draining in order.
    work();
    emit_ready(true);
    for (auto& t : pool) t.join();
    emit_ready(false);
    if (!opts.checkpoint_path.empty() && !primes.empty())
        detail::write_checkpoint(opts.checkpoint_path, lo, hi, primes.back(),
                                 summary.count, summary.min_dens);
    return summary;
}

// Wall-Sun-Sun sweep: quick nu_p(F(p - eps)) >= 2 test per prime, and a
// full multi-channel re-verification for any candidate before reporting.
inline std::vector<std::uint64_t> wss_sweep(std::uint64_t lo, std::uint64_t hi) {
    if (lo > hi) throw std::invalid_argument("wss_sweep: lo must be <= hi");
    std::vector<std::uint64_t> hits;
    for (std::uint64_t p : primes_in_range(lo, hi)) {
        if (p == 5) continue;
        int eps = epsilon(p);
        std::uint64_t n = static_cast<std::uint64_t>(static_cast<std::int64_t>(p) - eps);
        Integer p2 = Integer(static_cast<unsigned long>(p)) *
                     Integer(static_cast<unsigned long>(p));
        if (fib_mod(n, p2) != 0) continue;
        WallExponentRecord rec = wall_exponent(p);
        if (rec.e >= 2) hits.push_back(p);
    }
    return hits;
}

} // namespace fibdens
