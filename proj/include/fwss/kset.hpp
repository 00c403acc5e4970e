#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fwss/core.hpp"
#include "fwss/rng.hpp"
#include "fwss/wagner.hpp"
#include "json.hpp"

namespace fwss {

enum class ValidationMode { strict, experimental };

struct KsetConfig {
    std::size_t k = 4;
    std::int64_t m = 0;
    double alpha = 4.0;
    std::size_t cap_factor = 8;
    // 0 picks a budget from the observed oracle success rate.
    std::uint64_t max_iterations = 0;
    ValidationMode validation = ValidationMode::strict;
    ListMode mode = ListMode::fixed_weight;
    std::size_t workers = 1;
    // Solve the complemented instance when ell > n/2 (fixed weight only).
    bool complement = true;
    double time_budget_s = 0;  // 0: unlimited
    // Keep the level sizes of the last oracle call in the report.
    bool record_trace = false;
    // Sees every oracle success as a vector over the caller's instance.
    // Parallel runs call it from the worker threads.
    std::function<void(const BitVector&)> on_oracle_success;
};

struct ParamDiagnostics {
    bool ok = true;
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
};

// Strict mode requires m < C and log2 m >= 2 (log2 k)^2, where C is the
// number of subsets a base block supplies: C(n/k, ell/k) with fixed weight,
// 2^(n/k) unrestricted.  Experimental mode downgrades both to warnings and
// also warns above m = C^(log2 k + 1).
ParamDiagnostics validate_params(std::size_t n, std::size_t ell, const KsetConfig& config);

struct KsetReport {
    std::optional<BitVector> solution;
    std::uint64_t iterations = 0;
    std::uint64_t oracle_successes = 0;  // N_o, including the final success
    std::uint64_t divisions_sampled = 0;
    double elapsed_ms = 0;
    double expected_no = 0;
    std::uint64_t iteration_limit = 0;  // effective limit when the loop stopped
    std::string stop_reason;            // solved, iteration_limit, no_progress, time_budget
    bool complemented = false;
    std::vector<std::string> warnings;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    // Parallel runs: iterations per worker at the end and when the winner
    // published its solution.
    std::vector<std::uint64_t> worker_iterations;
    std::vector<std::uint64_t> worker_iterations_at_win;
    std::optional<OracleTrace> last_trace;

    double success_rate() const {
        return iterations ? static_cast<double>(oracle_successes) / static_cast<double>(iterations) : 0.0;
    }
};

// C(n, ell)/m with fixed weight, 2^n/m unrestricted.
double expected_oracle_successes(std::size_t n, std::size_t ell, std::int64_t m, ListMode mode);

// Random division (or bare partition when unrestricted), randomizers, lists,
// oracle; repeats until an oracle output is an integer solution.
KsetReport solve_kset(const Instance& instance, const KsetConfig& config, Rng rng);

// config.workers independent loops; worker 0 uses rng and worker w > 0 uses
// rng.split(w).  The first verified solution wins and counters are summed.
KsetReport solve_kset_parallel(const Instance& instance, const KsetConfig& config, Rng rng);

nlohmann::json kset_report_to_json(const KsetReport& report, const KsetConfig& config);

std::string to_string(ListMode mode);
std::string to_string(ValidationMode mode);

}  // namespace fwss
