#include "fwss/kset.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "fwss/splitting.hpp"

namespace fwss {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool use_complement(const Instance& instance, const KsetConfig& config) {
    return config.mode == ListMode::fixed_weight && config.complement && 2 * instance.ell() > instance.n();
}

std::string fmt_double(double v) {
    std::ostringstream out;
    out.precision(4);
    out << v;
    return out.str();
}

struct Setup {
    Instance work;
    bool complemented = false;
    KsetConfig config;
    ModParams params;
    std::optional<SplitParams> split;
    std::uint64_t target_mod = 0;
    double expected = 0;
    std::vector<std::string> warnings;
};

Setup prepare(const Instance& instance, const KsetConfig& config) {
    auto diag = validate_params(instance.n(), instance.ell(), config);
    if (!diag.ok) {
        std::string joined;
        for (const auto& e : diag.errors) joined += (joined.empty() ? "" : "; ") + e;
        throw ParameterError(joined);
    }
    for (const auto& w : diag.warnings) spdlog::debug("kset: {}", w);

    const bool complemented = use_complement(instance, config);
    Instance work = complemented ? complement_transform(instance) : instance;
    Setup s{std::move(work), complemented, config, ModParams(config.m, config.k, config.alpha), std::nullopt, 0,
            expected_oracle_successes(instance.n(), instance.ell(), config.m, config.mode), diag.warnings};
    if (config.mode == ListMode::fixed_weight) s.split.emplace(s.work.n(), s.work.ell(), config.k);
    s.target_mod = s.work.target_mod(static_cast<std::uint64_t>(config.m));
    return s;
}

struct LoopResult {
    std::optional<BitVector> solution;  // in the coordinates of Setup::work
    std::uint64_t iterations = 0;
    std::uint64_t successes = 0;
    std::uint64_t divisions = 0;
    std::uint64_t limit = 0;
    std::string stop_reason;
    std::optional<OracleTrace> trace;
};

// Budget from the observed success rate: 16 times the expected number of
// iterations, re-estimated every 100 iterations.
constexpr std::uint64_t kRecheckEvery = 100;
constexpr std::uint64_t kGiveUpWithoutSuccess = 1600;

LoopResult run_loop(const Setup& s, Rng& rng, Clock::time_point start, const std::atomic<bool>* found = nullptr,
                    std::atomic<std::uint64_t>* progress = nullptr) {
    const auto& cfg = s.config;
    const std::size_t n = s.work.n();
    const BuildOptions build{cfg.mode, cfg.validation == ValidationMode::experimental};
    const OracleOptions oracle_options{cfg.cap_factor};
    const BigInt modulus(cfg.m);

    LoopResult r;
    r.limit = cfg.max_iterations;
    for (;;) {
        if (found && found->load(std::memory_order_acquire)) {
            r.stop_reason = "cancelled";
            break;
        }
        if (cfg.max_iterations == 0 && r.iterations > 0 && r.iterations % kRecheckEvery == 0) {
            if (r.successes == 0 && r.iterations >= kGiveUpWithoutSuccess) {
                r.stop_reason = "no_progress";
                break;
            }
            if (r.successes > 0) {
                const double rate = static_cast<double>(r.successes) / static_cast<double>(r.iterations);
                const double budget = 16.0 * std::max(s.expected, 1.0) / rate;
                r.limit = budget >= 1e18 ? std::uint64_t{1000000000000000000}
                                         : std::max<std::uint64_t>(kRecheckEvery, static_cast<std::uint64_t>(budget));
            }
        }
        if (r.limit && r.iterations >= r.limit) {
            r.stop_reason = "iteration_limit";
            break;
        }
        if (cfg.time_budget_s > 0 && seconds_since(start) > cfg.time_budget_s) {
            r.stop_reason = "time_budget";
            break;
        }

        ++r.iterations;
        if (progress) progress->store(r.iterations, std::memory_order_release);
        Division division = s.split ? random_division(*s.split, rng) : random_partition(n, cfg.k, rng);
        ++r.divisions;
        auto randomizers = draw_randomizers(s.params, rng);
        auto lists = build_lists(s.work, division, s.params, rng, build);
        apply_randomizers(lists, randomizers, s.params);
        OracleTrace trace;
        auto found_mod = oracle(lists, s.params, rng, oracle_options, cfg.record_trace ? &trace : nullptr);
        if (cfg.record_trace) r.trace = std::move(trace);
        if (!found_mod) continue;

        ++r.successes;
        BitVector x = solution_vector(s.work, division, lists, *found_mod);
        if (BigInt(evaluate(s.work, x) % modulus) != s.target_mod) {
            throw std::logic_error("oracle success does not satisfy the modular equation");
        }
        if (s.split && x.weight() != s.work.ell()) {
            throw std::logic_error("oracle success has the wrong Hamming weight");
        }
        if (cfg.on_oracle_success) cfg.on_oracle_success(s.complemented ? x.complement() : x);
        const bool integer = s.split ? is_solution(s.work, x) : is_subset_sum_solution(s.work, x);
        if (integer) {
            r.solution = std::move(x);
            r.stop_reason = "solved";
            break;
        }
    }
    return r;
}

KsetReport start_report(const Setup& s, const Rng& rng) {
    KsetReport report;
    report.expected_no = s.expected;
    report.complemented = s.complemented;
    report.warnings = s.warnings;
    report.seed = rng.seed();
    report.stream = rng.stream();
    return report;
}

BitVector to_original(const Instance& instance, const Setup& s, const BitVector& x) {
    BitVector out = s.complemented ? x.complement() : x;
    const bool ok = s.split ? is_solution(instance, out) : is_subset_sum_solution(instance, out);
    if (!ok) throw std::logic_error("kset returned a vector that is not a solution");
    return out;
}

}  // namespace

nlohmann::json ParamDiagnostics::to_json() const {
    return {{"ok", ok}, {"errors", errors}, {"warnings", warnings}};
}

ParamDiagnostics validate_params(std::size_t n, std::size_t ell, const KsetConfig& config) {
    ParamDiagnostics d;
    auto error = [&](std::string msg) {
        d.ok = false;
        d.errors.push_back(std::move(msg));
    };
    const std::size_t k = config.k;
    if (k < 2 || !std::has_single_bit(k)) error("k must be a power of two >= 2 (got " + std::to_string(k) + ")");
    if (config.m < 2 || config.m > kMaxModulus) error("m must lie in [2, 2^62] (got " + std::to_string(config.m) + ")");
    if (k > n) error("k <= n fails: k = " + std::to_string(k) + ", n = " + std::to_string(n));
    if (!(config.alpha > 0)) error("alpha must be positive");
    if (config.workers < 1) error("workers must be at least 1");
    const bool fixed = config.mode == ListMode::fixed_weight;
    if (fixed) {
        if (ell > n) error("ell <= n fails: ell = " + std::to_string(ell) + ", n = " + std::to_string(n));
        if (config.complement && 2 * ell > n) ell = n - ell;
        if (ell < k) error("k <= ell fails: k = " + std::to_string(k) + ", ell = " + std::to_string(ell));
    }
    if (!d.ok) return d;
    if (n - (k - 1) * (n / k) > 64) error("blocks are limited to 64 indices");
    if (!d.ok) return d;

    const std::size_t levels = static_cast<std::size_t>(std::countr_zero(k));
    const std::size_t b = n / k;
    const BigInt capacity = fixed ? binomial(b, ell / k) : BigInt(1) << b;
    const std::string cname = fixed ? "C(" + std::to_string(b) + "," + std::to_string(ell / k) + ")"
                                    : "2^" + std::to_string(b);
    const BigInt m(config.m);
    const bool strict = config.validation == ValidationMode::strict;
    auto violated = [&](std::string msg) {
        if (strict) {
            error(std::move(msg));
        } else {
            d.warnings.push_back(std::move(msg));
        }
    };

    if (!(m < capacity)) {
        violated("m < " + cname + " fails: m = " + m.str() + ", " + cname + " = " + capacity.str());
    }
    const double log_m = std::log2(static_cast<double>(config.m));
    const auto floor_bits = 2 * levels * levels;
    if (log_m < static_cast<double>(floor_bits)) {
        violated("log2 m >= 2 (log2 k)^2 fails: log2 m = " + fmt_double(log_m) +
                 ", 2 (log2 k)^2 = " + std::to_string(floor_bits));
    }
    if (!strict && m > boost::multiprecision::pow(capacity, static_cast<unsigned>(levels + 1))) {
        d.warnings.push_back("m <= " + cname + "^(log2 k + 1) fails: m = " + m.str() +
                             "; modular density is below the conjectured floor k/(log2 k + 1)");
    }

    // Every block has to supply more than 1/p distinct subsets.
    const ModParams params(config.m, k, config.alpha);
    BigInt smallest = capacity;
    if (fixed) {
        const SplitParams shape(n, ell, k);
        smallest = std::min(capacity, binomial(shape.block_size(k - 1), shape.block_weight(k - 1)));
    }
    if (smallest < params.min_list_size()) {
        violated("smallest block supplies " + smallest.str() + " subsets, below 1/p < " +
                 std::to_string(params.min_list_size()));
    }
    return d;
}

double expected_oracle_successes(std::size_t n, std::size_t ell, std::int64_t m, ListMode mode) {
    const BigInt count = mode == ListMode::fixed_weight ? binomial(n, ell) : BigInt(1) << n;
    return count.convert_to<double>() / static_cast<double>(m);
}

KsetReport solve_kset(const Instance& instance, const KsetConfig& config, Rng rng) {
    const auto start = Clock::now();
    const Setup s = prepare(instance, config);
    KsetReport report = start_report(s, rng);
    auto r = run_loop(s, rng, start);
    report.iterations = r.iterations;
    report.oracle_successes = r.successes;
    report.divisions_sampled = r.divisions;
    report.iteration_limit = r.limit;
    report.stop_reason = r.stop_reason;
    report.last_trace = std::move(r.trace);
    if (r.solution) report.solution = to_original(instance, s, *r.solution);
    report.elapsed_ms = seconds_since(start) * 1000.0;
    spdlog::debug("kset: {} after {} iterations, N_o = {}", report.stop_reason, report.iterations,
                  report.oracle_successes);
    return report;
}

KsetReport solve_kset_parallel(const Instance& instance, const KsetConfig& config, Rng rng) {
    if (config.workers <= 1) return solve_kset(instance, config, rng);
    const auto start = Clock::now();
    const Setup s = prepare(instance, config);
    KsetReport report = start_report(s, rng);

    const std::size_t workers = config.workers;
    std::atomic<bool> found{false};
    std::vector<std::atomic<std::uint64_t>> progress(workers);
    std::vector<LoopResult> results(workers);
    std::vector<std::uint64_t> at_win;
    std::mutex win_mutex;
    std::optional<std::size_t> winner;
    std::exception_ptr failure;

    auto work = [&](std::size_t w) {
        try {
            Rng local = w == 0 ? rng : rng.split(w);
            results[w] = run_loop(s, local, start, &found, &progress[w]);
            if (results[w].solution) {
                std::lock_guard lock(win_mutex);
                if (!winner) {
                    winner = w;
                    found.store(true, std::memory_order_release);
                    for (auto& p : progress) at_win.push_back(p.load(std::memory_order_acquire));
                }
            }
        } catch (...) {
            std::lock_guard lock(win_mutex);
            if (!failure) failure = std::current_exception();
            found.store(true, std::memory_order_release);
        }
    };

    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work, w);
    threads.clear();
    if (failure) std::rethrow_exception(failure);

    for (std::size_t w = 0; w < workers; ++w) {
        report.iterations += results[w].iterations;
        report.oracle_successes += results[w].successes;
        report.divisions_sampled += results[w].divisions;
        report.iteration_limit += results[w].limit;
        report.worker_iterations.push_back(results[w].iterations);
    }
    report.worker_iterations_at_win = std::move(at_win);
    const std::size_t lead = winner.value_or(0);
    report.stop_reason = winner ? "solved" : results[0].stop_reason;
    report.last_trace = std::move(results[lead].trace);
    if (winner) report.solution = to_original(instance, s, *results[*winner].solution);
    report.elapsed_ms = seconds_since(start) * 1000.0;
    return report;
}

std::string to_string(ListMode mode) { return mode == ListMode::fixed_weight ? "fixed" : "unrestricted"; }

std::string to_string(ValidationMode mode) { return mode == ValidationMode::strict ? "strict" : "experimental"; }

nlohmann::json kset_report_to_json(const KsetReport& report, const KsetConfig& config) {
    const ModParams params(config.m, config.k, config.alpha);
    nlohmann::json doc;
    doc["algorithm"] = "kset";
    doc["solution"] = report.solution ? nlohmann::json(report.solution->to_string()) : nlohmann::json(nullptr);
    doc["stop_reason"] = report.stop_reason;
    doc["counters"] = {{"iterations", report.iterations},
                       {"N_o", report.oracle_successes},
                       {"divisions_sampled", report.divisions_sampled},
                       {"success_rate", report.success_rate()},
                       {"iteration_limit", report.iteration_limit},
                       {"elapsed_ms", report.elapsed_ms}};
    doc["expected_N_o"] = report.expected_no;
    doc["complemented"] = report.complemented;
    doc["warnings"] = report.warnings;
    doc["seed"] = report.seed;
    doc["stream"] = report.stream;
    doc["params"] = {{"k", config.k},
                     {"m", config.m},
                     {"alpha", config.alpha},
                     {"cap_factor", config.cap_factor},
                     {"max_iterations", config.max_iterations},
                     {"validation", to_string(config.validation)},
                     {"mode", to_string(config.mode)},
                     {"workers", config.workers},
                     {"complement", config.complement},
                     {"p", params.p()},
                     {"list_size", params.list_size()},
                     {"half_widths", params.half_widths()}};
    if (!report.worker_iterations.empty()) {
        doc["workers"] = {{"iterations", report.worker_iterations},
                          {"iterations_at_win", report.worker_iterations_at_win}};
    }
    if (report.last_trace) doc["trace"] = report.last_trace->to_json();
    return doc;
}

}  // namespace fwss
