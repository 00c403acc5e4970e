#include "fwss/bench.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <locale>
#include <sstream>

#include <spdlog/spdlog.h>

namespace fwss {

namespace {

using Clock = std::chrono::steady_clock;

std::string number(double v, int precision, bool fixed) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    if (fixed) out << std::fixed;
    out << std::setprecision(precision) << v;
    return out.str();
}

ExperimentRow run_cell(const ExperimentSpec& spec, std::size_t cell, std::size_t k, double d_m,
                       const TrialObserver& observer) {
    ExperimentRow row;
    row.k = k;
    row.d_m = d_m;
    row.m = modulus_for(spec.n, d_m);
    row.trials_requested = spec.trials;
    const std::size_t ell = spec.ell.value_or(spec.n / 2);
    row.expected_no = expected_oracle_successes(spec.n, ell, row.m, spec.mode);

    KsetConfig config;
    config.k = k;
    config.m = row.m;
    config.alpha = spec.alpha;
    config.cap_factor = spec.cap_factor;
    config.max_iterations = spec.max_iterations;
    config.validation = spec.validation;
    config.mode = spec.mode;
    config.workers = spec.workers;

    const Rng cell_rng = Rng(spec.seed).split(cell);
    const auto cell_start = Clock::now();
    std::uint64_t calls = 0, successes = 0;
    double log_sum = 0, time_sum = 0, no_sum = 0;

    for (std::size_t trial = 0; trial < spec.trials; ++trial) {
        const Rng trial_rng = cell_rng.split(trial);
        Rng instance_rng = trial_rng.split(0);
        const Instance instance = spec.mode == ListMode::unrestricted
                                      ? gen_unrestricted_instance(spec.n, spec.density, instance_rng)
                                      : gen_instance(spec.n, ell, spec.density, instance_rng, true);
        if (spec.cell_budget_s > 0) {
            const double used = std::chrono::duration<double>(Clock::now() - cell_start).count();
            if (used >= spec.cell_budget_s) {
                row.complete = false;
                break;
            }
            config.time_budget_s = spec.cell_budget_s - used;
        }
        if (spec.on_oracle_success) {
            config.on_oracle_success = [&](const BitVector& x) { spec.on_oracle_success(instance, x); };
        }
        const auto report = solve_kset_parallel(instance, config, trial_rng.split(1));

        TrialRecord record;
        record.trial = trial;
        record.solved = report.solution.has_value();
        record.oracle_successes = report.oracle_successes;
        record.iterations = report.iterations;
        record.seconds = spec.record_timing ? report.elapsed_ms / 1000.0 : 0.0;
        record.stop_reason = report.stop_reason;
        row.records.push_back(record);
        calls += report.iterations;
        successes += report.oracle_successes;
        if (record.solved) {
            ++row.trials;
            no_sum += static_cast<double>(record.oracle_successes);
            log_sum += std::log(static_cast<double>(record.oracle_successes));
            time_sum += record.seconds;
        }
        spdlog::debug("bench: k={} d_m={} trial {} N_o={} ({})", k, d_m, trial, record.oracle_successes,
                      record.stop_reason);
        if (observer) observer(row, record, instance, report);
        if (report.stop_reason == "time_budget") {
            row.complete = false;
            break;
        }
    }
    if (row.trials > 0) {
        const auto solved = static_cast<double>(row.trials);
        row.mean_no = no_sum / solved;
        row.geo_mean_no = std::exp(log_sum / solved);
        row.mean_time_s = time_sum / solved;
    }
    row.success_pct = calls ? 100.0 * static_cast<double>(successes) / static_cast<double>(calls) : 0.0;
    return row;
}

std::vector<ExperimentRow> run_cells(const ExperimentSpec& spec, const TrialObserver& observer) {
    if (spec.trials < 1) throw InputError("trials must be at least 1");
    if (spec.ks.empty() || spec.dms.empty()) throw InputError("experiment needs at least one k and one d_m");
    std::vector<std::pair<std::size_t, double>> cells;
    for (auto k : spec.ks) {
        for (auto d : spec.dms) cells.emplace_back(k, d);
    }
    std::vector<ExperimentRow> rows(cells.size());
    if (spec.parallel_cells) {
        std::vector<std::future<ExperimentRow>> pending;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            pending.push_back(std::async(std::launch::async, run_cell, std::cref(spec), c, cells[c].first,
                                         cells[c].second, std::cref(observer)));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) rows[c] = pending[c].get();
    } else {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            rows[c] = run_cell(spec, c, cells[c].first, cells[c].second, observer);
        }
    }
    return rows;
}

}  // namespace

std::int64_t modulus_for(std::size_t n, double d_m) {
    if (!(d_m > 0)) throw InputError("d_m must be positive");
    const auto bits = static_cast<std::int64_t>(std::floor(static_cast<double>(n) / d_m));
    if (bits < 1 || bits > 62) throw ParameterError("n / d_m must give between 1 and 62 modulus bits");
    return std::int64_t{1} << bits;
}

std::vector<ExperimentRow> run_no_experiment(const ExperimentSpec& spec, const TrialObserver& observer) {
    return run_cells(spec, observer);
}

std::vector<ExperimentRow> run_success_experiment(const ExperimentSpec& spec, const TrialObserver& observer) {
    return run_cells(spec, observer);
}

std::string format_csv(const std::vector<ExperimentRow>& rows, const CsvMetadata& metadata) {
    std::string out;
    for (const auto& [key, value] : metadata) out += "# " + key + "=" + value + "\n";
    out += "k,d_m,mean_No,expected_No,success_pct,mean_time_s,trials\n";
    for (const auto& r : rows) {
        out += std::to_string(r.k) + "," + number(r.d_m, 6, false) + "," + number(r.mean_no, 2, true) + "," +
               number(r.expected_no, 2, true) + "," + number(r.success_pct, 2, true) + "," +
               number(r.mean_time_s, 4, true) + "," + std::to_string(r.trials) + "\n";
    }
    return out;
}

void write_csv(const std::vector<ExperimentRow>& rows, const std::filesystem::path& path,
               const CsvMetadata& metadata) {
    if (rows.empty()) throw InputError("no rows to write");
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw ResourceError("cannot open " + path.string() + " for writing");
    file << format_csv(rows, metadata);
    file.flush();
    if (!file) throw ResourceError("failed writing " + path.string());
}

CsvMetadata spec_metadata(const ExperimentSpec& spec) {
    CsvMetadata meta;
    meta.emplace_back("n", std::to_string(spec.n));
    meta.emplace_back("ell", spec.mode == ListMode::fixed_weight ? std::to_string(spec.ell.value_or(spec.n / 2))
                                                                 : std::string("hidden weight per instance"));
    meta.emplace_back("density", number(spec.density, 6, false));
    meta.emplace_back("mode", to_string(spec.mode));
    meta.emplace_back("validation", to_string(spec.validation));
    meta.emplace_back("alpha", number(spec.alpha, 6, false));
    meta.emplace_back("cap_factor", std::to_string(spec.cap_factor));
    meta.emplace_back("list_size", "ceil(alpha * m^(1/(log2 k + 1)))");
    meta.emplace_back("trials", std::to_string(spec.trials));
    meta.emplace_back("seed", std::to_string(spec.seed));
    return meta;
}

}  // namespace fwss
