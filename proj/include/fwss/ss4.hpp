#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fwss/core.hpp"
#include "fwss/splitting.hpp"
#include "json.hpp"

namespace fwss {

// Subset of one block, as a bit set over the block's positions (bit p is
// division.blocks[j][p]).  Blocks are limited to 64 indices.
using BlockMask = std::uint64_t;

inline constexpr std::uint64_t kTableCap = std::uint64_t{1} << 24;

template <class V>
struct PartialSum {
    std::size_t block = 0;
    BlockMask mask = 0;
    V value{};
};

// All weight-w_j subsets of one block, ascending by value; equal values keep
// lexicographic order of the chosen positions.
template <class V>
using SortedTable = std::vector<PartialSum<V>>;

std::vector<std::uint32_t> mask_indices(const Division& division, std::size_t block, BlockMask mask);

// Calls visit(mask) for each weight-`weight` subset of `size` positions, in
// lexicographic order of the position tuples.
template <class Visit>
void for_each_block_subset(std::size_t size, std::size_t weight, Visit&& visit) {
    std::vector<std::size_t> pos(weight);
    for (std::size_t i = 0; i < weight; ++i) pos[i] = i;
    for (;;) {
        BlockMask mask = 0;
        for (auto p : pos) mask |= BlockMask{1} << p;
        visit(mask);
        std::size_t i = weight;
        while (i > 0 && pos[i - 1] == size - weight + (i - 1)) --i;
        if (i == 0) return;
        ++pos[i - 1];
        for (std::size_t j = i; j < weight; ++j) pos[j] = pos[j - 1] + 1;
    }
}

template <class V>
SortedTable<V> enumerate_subproblems(std::span<const V> weights, const Division& division, std::size_t j,
                                     std::uint64_t cap = kTableCap) {
    const auto& block = division.blocks.at(j);
    const std::size_t w = division.weights.at(j);
    if (block.size() > 64) throw ParameterError("blocks are limited to 64 indices");
    if (w > block.size()) throw ParameterError("block weight exceeds block size");
    if (binomial(block.size(), w) > cap) {
        throw ResourceError("table for block " + std::to_string(j) + " exceeds the cap of " +
                            std::to_string(cap) + " entries");
    }
    SortedTable<V> table;
    for_each_block_subset(block.size(), w, [&](BlockMask mask) {
        V value{};
        for (std::size_t p = 0; p < block.size(); ++p) {
            if (mask >> p & 1) value += weights[block[p]];
        }
        table.push_back({j, mask, std::move(value)});
    });
    std::stable_sort(table.begin(), table.end(),
                     [](const PartialSum<V>& x, const PartialSum<V>& y) { return x.value < y.value; });
    return table;
}

SortedTable<BigInt> enumerate_subproblems(const Instance& instance, const Division& division, std::size_t j);

struct SearchStats {
    std::uint64_t steps = 0;
    std::size_t max_queue = 0;
};

using Quadruple = std::array<BlockMask, 4>;

namespace detail {

template <class V>
struct QueueEntry {
    V key;
    std::uint32_t outer;
    std::uint32_t inner;
};

template <class V>
struct LaterFirst {
    bool operator()(const QueueEntry<V>& x, const QueueEntry<V>& y) const {
        if (x.key != y.key) return x.key > y.key;
        return std::pair(x.outer, x.inner) > std::pair(y.outer, y.inner);
    }
};

template <class V>
struct EarlierFirst {
    bool operator()(const QueueEntry<V>& x, const QueueEntry<V>& y) const {
        if (x.key != y.key) return x.key < y.key;
        return std::pair(x.outer, x.inner) > std::pair(y.outer, y.inner);
    }
};

// Sums of T1 x T2 in ascending order and T3 x T4 in descending order, each
// held as one resident pair per outer-table entry.
template <class V>
class PairQueues {
public:
    PairQueues(const SortedTable<V>& t1, const SortedTable<V>& t2, const SortedTable<V>& t3,
               const SortedTable<V>& t4)
        : t1_(t1), t2_(t2), t3_(t3), t4_(t4) {
        if (t2.empty() || t4.empty()) return;
        for (std::uint32_t i = 0; i < t1.size(); ++i) low_.push({t1[i].value + t2.front().value, i, 0});
        const auto last = static_cast<std::uint32_t>(t4.size() - 1);
        for (std::uint32_t i = 0; i < t3.size(); ++i) high_.push({t3[i].value + t4.back().value, i, last});
    }

    bool empty() const { return low_.empty() || high_.empty(); }
    bool low_empty() const { return low_.empty(); }
    bool high_empty() const { return high_.empty(); }
    std::size_t resident() const { return std::max(low_.size(), high_.size()); }
    const QueueEntry<V>& low() const { return low_.top(); }
    const QueueEntry<V>& high() const { return high_.top(); }

    void advance_low() {
        auto e = low_.top();
        low_.pop();
        if (e.inner + 1 < t2_.size()) {
            ++e.inner;
            e.key = t1_[e.outer].value + t2_[e.inner].value;
            low_.push(std::move(e));
        }
    }

    void advance_high() {
        auto e = high_.top();
        high_.pop();
        if (e.inner > 0) {
            --e.inner;
            e.key = t3_[e.outer].value + t4_[e.inner].value;
            high_.push(std::move(e));
        }
    }

private:
    const SortedTable<V>& t1_;
    const SortedTable<V>& t2_;
    const SortedTable<V>& t3_;
    const SortedTable<V>& t4_;
    std::priority_queue<QueueEntry<V>, std::vector<QueueEntry<V>>, LaterFirst<V>> low_;
    std::priority_queue<QueueEntry<V>, std::vector<QueueEntry<V>>, EarlierFirst<V>> high_;
};

// Target below the smallest or above the largest achievable sum.
template <class V>
bool out_of_range(const SortedTable<V>& t1, const SortedTable<V>& t2, const SortedTable<V>& t3,
                  const SortedTable<V>& t4, const V& target) {
    if (t1.empty() || t2.empty() || t3.empty() || t4.empty()) return true;
    V low = t1.front().value + t2.front().value + t3.front().value + t4.front().value;
    V high = t1.back().value + t2.back().value + t3.back().value + t4.back().value;
    return target < low || high < target;
}

}  // namespace detail

// Per-step record of the two queue tops, for monotonicity checks.
template <class V>
using SearchTrace = std::vector<std::pair<V, V>>;

// Finds masks m1..m4 (one per table) whose values sum to target.  Every
// step retires one pair for good, so steps <= |T1||T2| + |T3||T4|.
template <class V>
std::optional<Quadruple> ss_search(const SortedTable<V>& t1, const SortedTable<V>& t2,
                                   const SortedTable<V>& t3, const SortedTable<V>& t4, const V& target,
                                   SearchStats& stats, SearchTrace<V>* trace = nullptr) {
    if (detail::out_of_range(t1, t2, t3, t4, target)) return std::nullopt;
    detail::PairQueues<V> queues(t1, t2, t3, t4);
    while (!queues.empty()) {
        stats.max_queue = std::max(stats.max_queue, queues.resident());
        ++stats.steps;
        const auto& lo = queues.low();
        const auto& hi = queues.high();
        if (trace) trace->emplace_back(lo.key, hi.key);
        V sum = lo.key + hi.key;
        if (sum < target) {
            queues.advance_low();
        } else if (target < sum) {
            queues.advance_high();
        } else {
            return Quadruple{t1[lo.outer].mask, t2[lo.inner].mask, t3[hi.outer].mask, t4[hi.inner].mask};
        }
    }
    return std::nullopt;
}

// Reports every quadruple summing to target exactly once.  On a match, all
// resident pairs sharing the two top keys are drained together and crossed.
template <class V>
void ss_search_all(const SortedTable<V>& t1, const SortedTable<V>& t2, const SortedTable<V>& t3,
                   const SortedTable<V>& t4, const V& target, SearchStats& stats,
                   const std::function<void(const Quadruple&)>& emit) {
    if (detail::out_of_range(t1, t2, t3, t4, target)) return;
    detail::PairQueues<V> queues(t1, t2, t3, t4);
    while (!queues.empty()) {
        stats.max_queue = std::max(stats.max_queue, queues.resident());
        ++stats.steps;
        V low_key = queues.low().key;
        V high_key = queues.high().key;
        V sum = low_key + high_key;
        if (sum < target) {
            queues.advance_low();
            continue;
        }
        if (target < sum) {
            queues.advance_high();
            continue;
        }
        std::vector<std::pair<BlockMask, BlockMask>> lows, highs;
        while (!queues.low_empty() && queues.low().key == low_key) {
            lows.emplace_back(t1[queues.low().outer].mask, t2[queues.low().inner].mask);
            queues.advance_low();
        }
        while (!queues.high_empty() && queues.high().key == high_key) {
            highs.emplace_back(t3[queues.high().outer].mask, t4[queues.high().inner].mask);
            queues.advance_high();
        }
        for (const auto& [m1, m2] : lows) {
            for (const auto& [m3, m4] : highs) emit(Quadruple{m1, m2, m3, m4});
        }
    }
}

struct SolveLimits {
    std::uint64_t max_divisions = 0;  // 0: until the source is exhausted
    double time_budget_s = 0;         // 0: unlimited
    std::uint64_t table_cap = kTableCap;
};

struct SolveReport {
    std::string algorithm;
    std::string division_source;
    std::optional<BitVector> solution;
    std::uint64_t divisions_tried = 0;
    std::uint64_t queue_steps = 0;
    std::uint64_t max_division_steps = 0;
    std::size_t max_queue = 0;
    std::size_t peak_table = 0;
    double elapsed_ms = 0;
};

// Division or time budget ran out before the source was exhausted.
class LimitExceeded : public ResourceError {
public:
    LimitExceeded(const std::string& what, SolveReport partial)
        : ResourceError(what), partial_(std::move(partial)) {}
    const SolveReport& partial() const { return partial_; }

private:
    SolveReport partial_;
};

// Schroeppel-Shamir over 4-divisions drawn from `source`.
SolveReport solve_ss4(const Instance& instance, DivisionSource& source, const SolveLimits& limits = {});
// Sorted-table meet in the middle over 2-divisions drawn from `source`.
SolveReport solve_mitm2(const Instance& instance, DivisionSource& source, const SolveLimits& limits = {});

nlohmann::json report_to_json(const SolveReport& report);

}  // namespace fwss
