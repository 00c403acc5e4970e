#include "fwss/ss4.hpp"

#include <chrono>

namespace fwss {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

BitVector assemble(const Instance& instance, const Division& division, std::span<const BlockMask> masks) {
    BitVector x(instance.n());
    for (std::size_t j = 0; j < masks.size(); ++j) {
        for (auto i : mask_indices(division, j, masks[j])) x.set(i);
    }
    return x;
}

void require_sound(const Instance& instance, const BitVector& x, const char* algorithm) {
    if (!is_solution(instance, x)) {
        throw std::logic_error(std::string(algorithm) + " produced a vector that is not a solution");
    }
}

// Drives a per-division search over the source, honoring limits.
template <class PerDivision>
SolveReport drive(const Instance& instance, DivisionSource& source, const SolveLimits& limits,
                  std::string algorithm, std::size_t k, PerDivision&& per_division) {
    const auto start = Clock::now();
    SolveReport report;
    report.algorithm = std::move(algorithm);
    report.division_source = source.name();
    for (;;) {
        auto division = source.next();
        if (!division) break;
        if (limits.max_divisions && report.divisions_tried >= limits.max_divisions) {
            report.elapsed_ms = elapsed_ms(start);
            throw LimitExceeded("division budget of " + std::to_string(limits.max_divisions) + " exhausted",
                                report);
        }
        if (limits.time_budget_s > 0 && elapsed_ms(start) > limits.time_budget_s * 1000.0) {
            report.elapsed_ms = elapsed_ms(start);
            throw LimitExceeded("time budget exhausted", report);
        }
        if (division->k() != k) {
            throw ParameterError(report.algorithm + " needs " + std::to_string(k) + "-divisions");
        }
        ++report.divisions_tried;
        auto masks = per_division(*division, report);
        if (masks) {
            BitVector x = assemble(instance, *division, *masks);
            require_sound(instance, x, report.algorithm.c_str());
            report.solution = std::move(x);
            break;
        }
    }
    report.elapsed_ms = elapsed_ms(start);
    return report;
}

template <class V>
SolveReport solve_ss4_with(const Instance& instance, std::span<const V> weights, const V& target,
                           DivisionSource& source, const SolveLimits& limits) {
    return drive(instance, source, limits, "ss4", 4,
                 [&](const Division& d, SolveReport& report) -> std::optional<Quadruple> {
                     std::array<SortedTable<V>, 4> tables;
                     for (std::size_t j = 0; j < 4; ++j) {
                         tables[j] = enumerate_subproblems<V>(weights, d, j, limits.table_cap);
                         report.peak_table = std::max(report.peak_table, tables[j].size());
                     }
                     SearchStats stats;
                     auto found = ss_search(tables[0], tables[1], tables[2], tables[3], target, stats);
                     report.queue_steps += stats.steps;
                     report.max_division_steps = std::max(report.max_division_steps, stats.steps);
                     report.max_queue = std::max(report.max_queue, stats.max_queue);
                     return found;
                 });
}

template <class V>
SolveReport solve_mitm2_with(const Instance& instance, std::span<const V> weights, const V& target,
                             DivisionSource& source, const SolveLimits& limits) {
    return drive(instance, source, limits, "mitm2", 2,
                 [&](const Division& d, SolveReport& report) -> std::optional<std::array<BlockMask, 2>> {
                     auto left = enumerate_subproblems<V>(weights, d, 0, limits.table_cap);
                     auto right = enumerate_subproblems<V>(weights, d, 1, limits.table_cap);
                     report.peak_table = std::max({report.peak_table, left.size(), right.size()});
                     std::uint64_t steps = 0;
                     std::optional<std::array<BlockMask, 2>> found;
                     for (const auto& p : right) {
                         ++steps;
                         V want = target - p.value;
                         auto it = std::lower_bound(
                             left.begin(), left.end(), want,
                             [](const PartialSum<V>& e, const V& v) { return e.value < v; });
                         if (it != left.end() && it->value == want) {
                             found = std::array<BlockMask, 2>{it->mask, p.mask};
                             break;
                         }
                     }
                     report.queue_steps += steps;
                     report.max_division_steps = std::max(report.max_division_steps, steps);
                     return found;
                 });
}

}  // namespace

std::vector<std::uint32_t> mask_indices(const Division& division, std::size_t block, BlockMask mask) {
    const auto& indices = division.blocks.at(block);
    std::vector<std::uint32_t> out;
    for (std::size_t p = 0; p < indices.size(); ++p) {
        if (mask >> p & 1) out.push_back(indices[p]);
    }
    return out;
}

SortedTable<BigInt> enumerate_subproblems(const Instance& instance, const Division& division, std::size_t j) {
    return enumerate_subproblems<BigInt>(std::span<const BigInt>(instance.weights()), division, j);
}

SolveReport solve_ss4(const Instance& instance, DivisionSource& source, const SolveLimits& limits) {
    if (instance.fits_int64()) {
        auto a = instance.weights_int64();
        return solve_ss4_with<std::int64_t>(instance, a, instance.target_int64(), source, limits);
    }
    return solve_ss4_with<BigInt>(instance, instance.weights(), instance.target(), source, limits);
}

SolveReport solve_mitm2(const Instance& instance, DivisionSource& source, const SolveLimits& limits) {
    if (instance.fits_int64()) {
        auto a = instance.weights_int64();
        return solve_mitm2_with<std::int64_t>(instance, a, instance.target_int64(), source, limits);
    }
    return solve_mitm2_with<BigInt>(instance, instance.weights(), instance.target(), source, limits);
}

nlohmann::json report_to_json(const SolveReport& report) {
    nlohmann::json doc;
    doc["algorithm"] = report.algorithm;
    doc["division_source"] = report.division_source;
    doc["solution"] = report.solution ? nlohmann::json(report.solution->to_string()) : nlohmann::json(nullptr);
    doc["counters"] = {{"divisions_tried", report.divisions_tried},
                       {"queue_steps", report.queue_steps},
                       {"max_division_steps", report.max_division_steps},
                       {"max_queue", report.max_queue},
                       {"peak_table", report.peak_table},
                       {"elapsed_ms", report.elapsed_ms}};
    return doc;
}

}  // namespace fwss
