#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fwss/kset.hpp"

namespace fwss {

struct ExperimentSpec {
    std::size_t n = 24;
    std::optional<std::size_t> ell;  // fixed-weight mode; defaults to n/2
    double density = 0.9;
    std::vector<std::size_t> ks = {2, 4, 8};
    std::vector<double> dms = {1.5, 2.0, 4.0};
    std::size_t trials = 10;
    std::uint64_t seed = 0;
    ListMode mode = ListMode::unrestricted;
    ValidationMode validation = ValidationMode::experimental;
    double alpha = 4.0;
    std::size_t cap_factor = 8;
    std::uint64_t max_iterations = 0;
    std::size_t workers = 1;
    double cell_budget_s = 600;  // 0: unlimited
    bool record_timing = true;   // false writes 0 so reruns are byte-identical
    bool parallel_cells = false;
    // Forwarded to every kset run together with the trial's instance.
    std::function<void(const Instance&, const BitVector&)> on_oracle_success;
};

struct TrialRecord {
    std::size_t trial = 0;
    bool solved = false;
    std::uint64_t oracle_successes = 0;
    std::uint64_t iterations = 0;
    double seconds = 0;
    std::string stop_reason;
};

struct ExperimentRow {
    std::size_t k = 0;
    double d_m = 0;
    std::int64_t m = 0;
    double mean_no = 0;  // arithmetic mean over solved trials
    double geo_mean_no = 0;
    double expected_no = 0;
    double success_pct = 0;  // oracle successes per oracle call, all trials
    double mean_time_s = 0;
    std::size_t trials = 0;  // solved trials
    std::size_t trials_requested = 0;
    bool complete = true;  // false when the cell budget cut it short
    std::vector<TrialRecord> records;
};

// 2^floor(n / d_m).
std::int64_t modulus_for(std::size_t n, double d_m);

// Called after every trial with the cell row so far (may be empty).
using TrialObserver = std::function<void(const ExperimentRow&, const TrialRecord&, const Instance&,
                                         const KsetReport&)>;

// Per (k, d_m) cell: fresh planted instances solved with kset, N_o averaged.
std::vector<ExperimentRow> run_no_experiment(const ExperimentSpec& spec, const TrialObserver& observer = {});
// Same runs, reported for the oracle success rate and wall time columns.
std::vector<ExperimentRow> run_success_experiment(const ExperimentSpec& spec,
                                                  const TrialObserver& observer = {});

using CsvMetadata = std::vector<std::pair<std::string, std::string>>;

// Header k,d_m,mean_No,expected_No,success_pct,mean_time_s,trials and one line
// per row.  Metadata, if any, goes first as "# key=value" lines.
void write_csv(const std::vector<ExperimentRow>& rows, const std::filesystem::path& path,
               const CsvMetadata& metadata = {});
std::string format_csv(const std::vector<ExperimentRow>& rows, const CsvMetadata& metadata = {});

CsvMetadata spec_metadata(const ExperimentSpec& spec);

}  // namespace fwss
