#include "fwss/wagner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace fwss {

namespace {

std::int64_t mod_add(std::int64_t a, std::int64_t b, std::int64_t m) {
    std::int64_t s = a + b;  // a, b in [0, m), m <= 2^62
    return s >= m ? s - m : s;
}

std::int64_t mod_neg(std::int64_t a, std::int64_t m) { return a == 0 ? 0 : m - a; }

std::int64_t subset_sum_mod(const std::vector<std::uint32_t>& block, BlockMask mask,
                            const std::vector<std::uint64_t>& a_mod, std::int64_t m) {
    std::int64_t s = 0;
    for (std::size_t p = 0; p < block.size(); ++p) {
        if (mask >> p & 1) s = mod_add(s, static_cast<std::int64_t>(a_mod[block[p]]), m);
    }
    return s;
}

BlockMask random_weighted_mask(std::size_t size, std::size_t weight, Rng& rng) {
    // Floyd's algorithm.
    BlockMask mask = 0;
    for (std::size_t j = size - weight; j < size; ++j) {
        auto r = static_cast<std::size_t>(rng.uniform(j + 1));
        BlockMask bit = BlockMask{1} << r;
        mask |= (mask & bit) ? (BlockMask{1} << j) : bit;
    }
    return mask;
}

BlockMask random_free_mask(std::size_t size, Rng& rng) {
    BlockMask word = rng.next_u64();
    return size >= 64 ? word : word & ((BlockMask{1} << size) - 1);
}

std::vector<BlockMask> all_masks(std::size_t size, std::size_t weight, ListMode mode) {
    std::vector<BlockMask> out;
    if (mode == ListMode::fixed_weight) {
        for_each_block_subset(size, weight, [&](BlockMask mask) { out.push_back(mask); });
    } else {
        if (size >= 63) throw ParameterError("block too large to enumerate every subset");
        for (BlockMask mask = 0; mask < (BlockMask{1} << size); ++mask) out.push_back(mask);
    }
    return out;
}

LeafList make_leaf(const Division& division, std::size_t j, std::vector<BlockMask> subsets,
                   const std::vector<std::uint64_t>& a_mod, std::int64_t m) {
    LeafList list;
    list.block = j;
    list.subsets = std::move(subsets);
    list.sums.reserve(list.subsets.size());
    for (auto mask : list.subsets) list.sums.push_back(subset_sum_mod(division.blocks[j], mask, a_mod, m));
    return list;
}

void fold_target(std::vector<LeafList>& lists, const Instance& instance, std::int64_t m) {
    auto t = static_cast<std::int64_t>(instance.target_mod(static_cast<std::uint64_t>(m)));
    auto& last = lists.back();
    last.offset = mod_add(last.offset, mod_neg(t, m), m);
    for (auto& list : lists) list.refresh(m);
}

void check_lists_shape(const Instance& instance, const Division& division, const ModParams& params) {
    if (division.k() != params.k()) {
        throw ParameterError("division has " + std::to_string(division.k()) + " blocks but k = " +
                             std::to_string(params.k()));
    }
    std::size_t n = 0;
    for (const auto& block : division.blocks) {
        if (block.size() > 64) throw ParameterError("blocks are limited to 64 indices");
        n += block.size();
    }
    if (n != instance.n()) throw ParameterError("division does not cover the instance");
}

}  // namespace

std::int64_t balanced(std::int64_t x, std::int64_t m) {
    if (m < 2) throw InputError("modulus must be at least 2");
    std::int64_t r = x % m;
    if (r < 0) r += m;
    // r in [0, m); representatives above ceil(m/2) - 1 wrap to negatives.
    const std::int64_t upper = m - m / 2;  // ceil(m/2)
    return r >= upper ? r - m : r;
}

BigInt integer_root(const BigInt& value, unsigned degree) {
    if (value < 0) throw InputError("integer root of a negative value");
    if (degree == 0) throw InputError("root degree must be positive");
    if (value < 2 || degree == 1) return value;
    BigInt lo = 0;
    BigInt hi = BigInt(1) << (static_cast<unsigned>(boost::multiprecision::msb(value)) / degree + 1);
    while (lo < hi) {
        BigInt mid = (lo + hi + 1) / 2;
        if (boost::multiprecision::pow(mid, degree) <= value) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    return lo;
}

ModParams::ModParams(std::int64_t m, std::size_t k, double alpha) : m_(m), k_(k), alpha_(alpha) {
    if (m_ < 2 || m_ > kMaxModulus) throw ParameterError("modulus must lie in [2, 2^62]");
    if (k_ < 2 || !std::has_single_bit(k_)) throw ParameterError("k must be a power of two, at least 2");
    if (!(alpha_ > 0)) throw ParameterError("alpha must be positive");
    levels_ = static_cast<std::size_t>(std::countr_zero(k_));
    const auto degree = static_cast<unsigned>(levels_ + 1);
    p_ = std::pow(static_cast<double>(m_), -1.0 / degree);

    // m p^lambda = m^((L+1-lambda)/(L+1)).
    for (std::size_t level = 0; level <= levels_; ++level) {
        BigInt power = boost::multiprecision::pow(BigInt(m_), static_cast<unsigned>(degree - level));
        auto width = integer_root(power, degree).convert_to<std::int64_t>();
        half_widths_.push_back(width / 2);
    }

    min_list_size_ = integer_root(BigInt(m_), degree).convert_to<std::size_t>() + 1;
    double wanted = std::ceil(alpha_ / p_);
    list_size_ = std::max(min_list_size_, static_cast<std::size_t>(wanted));
}

void LeafList::refresh(std::int64_t m) {
    elements.resize(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) {
        elements[i] = {balanced(sums[i] + offset, m), static_cast<std::uint32_t>(i), 0};
    }
}

BigInt block_capacity(const Division& division, std::size_t j, ListMode mode) {
    const std::size_t size = division.blocks.at(j).size();
    if (mode == ListMode::unrestricted) return BigInt(1) << size;
    return binomial(size, division.weights.at(j));
}

std::vector<LeafList> build_lists(const Instance& instance, const Division& division, const ModParams& params,
                                  Rng& rng, const BuildOptions& options) {
    check_lists_shape(instance, division, params);
    const std::int64_t m = params.m();
    const auto a_mod = instance.weights_mod(static_cast<std::uint64_t>(m));
    const std::size_t target_size = params.list_size();

    std::vector<LeafList> lists;
    lists.reserve(params.k());
    for (std::size_t j = 0; j < params.k(); ++j) {
        const std::size_t size = division.blocks[j].size();
        const std::size_t weight = division.weights[j];
        const BigInt capacity = block_capacity(division, j, options.mode);

        std::vector<BlockMask> subsets;
        if (capacity <= target_size) {
            if (capacity < params.min_list_size() && !options.allow_short_lists) {
                throw ParameterError("block " + std::to_string(j) + " supplies only " + capacity.str() +
                                     " distinct subsets; the oracle needs more than 1/p, i.e. at least " +
                                     std::to_string(params.min_list_size()));
            }
            subsets = all_masks(size, weight, options.mode);
        } else if (capacity <= 4 * target_size) {
            subsets = all_masks(size, weight, options.mode);
            rng.partial_shuffle(std::span<BlockMask>(subsets), target_size);
            subsets.resize(target_size);
        } else {
            std::unordered_set<BlockMask> seen;
            seen.reserve(2 * target_size);
            subsets.reserve(target_size);
            while (subsets.size() < target_size) {
                BlockMask mask = options.mode == ListMode::fixed_weight ? random_weighted_mask(size, weight, rng)
                                                                        : random_free_mask(size, rng);
                if (seen.insert(mask).second) subsets.push_back(mask);
            }
        }
        lists.push_back(make_leaf(division, j, std::move(subsets), a_mod, m));
    }
    fold_target(lists, instance, m);
    return lists;
}

std::vector<LeafList> build_full_lists(const Instance& instance, const Division& division,
                                       const ModParams& params, ListMode mode) {
    check_lists_shape(instance, division, params);
    const std::int64_t m = params.m();
    const auto a_mod = instance.weights_mod(static_cast<std::uint64_t>(m));
    std::vector<LeafList> lists;
    for (std::size_t j = 0; j < params.k(); ++j) {
        lists.push_back(make_leaf(division, j, all_masks(division.blocks[j].size(), division.weights[j], mode),
                                  a_mod, m));
    }
    fold_target(lists, instance, m);
    return lists;
}

RandomizerSet draw_randomizers(const ModParams& params, Rng& rng) {
    RandomizerSet r(params.randomizer_count());
    for (auto& value : r) value = static_cast<std::int64_t>(rng.uniform(static_cast<std::uint64_t>(params.m())));
    return r;
}

std::vector<std::int64_t> randomizer_offsets(const ModParams& params, const RandomizerSet& randomizers) {
    if (randomizers.size() != params.randomizer_count()) {
        throw InputError("randomizing set has " + std::to_string(randomizers.size()) + " elements, expected " +
                         std::to_string(params.randomizer_count()));
    }
    const std::int64_t m = params.m();
    const std::size_t k = params.k();
    std::vector<std::int64_t> offsets(k, 0);
    auto add = [&](std::size_t list_1based, std::int64_t r) {
        auto& o = offsets[list_1based - 1];
        o = mod_add(o, r, m);
    };
    for (auto r : randomizers) {
        if (r < 0 || r >= m) throw InputError("randomizers must lie in [0, m)");
    }
    std::size_t next = 0;
    for (std::size_t i = 0; k >= 4 && i < k / 4; ++i) {
        const std::int64_t r1 = randomizers[next++];
        const std::int64_t r2 = randomizers[next++];
        add(4 * i + 1, r1);
        add(4 * i + 2, r2);
        add(4 * i + 3, mod_neg(r1, m));
        add(4 * i + 4, mod_neg(r2, m));
    }
    for (std::size_t j = 3; j <= params.levels(); ++j) {
        const std::size_t group = std::size_t{1} << j;
        for (std::size_t i = 0; i < k / group; ++i) {
            const std::int64_t r = randomizers[next++];
            add(group * i + group / 2, r);
            add(group * i + group, mod_neg(r, m));
        }
    }
    return offsets;
}

void apply_randomizers(std::vector<LeafList>& lists, const RandomizerSet& randomizers, const ModParams& params) {
    if (lists.size() != params.k()) throw InputError("expected one list per block");
    const auto offsets = randomizer_offsets(params, randomizers);
    std::int64_t net = 0;
    for (auto o : offsets) net = mod_add(net, o, params.m());
    if (net != 0) throw std::logic_error("randomizer offsets do not cancel");
    for (std::size_t j = 0; j < lists.size(); ++j) {
        lists[j].offset = mod_add(lists[j].offset, offsets[j], params.m());
        lists[j].refresh(params.m());
    }
}

MergeList merge(const MergeList& first, const MergeList& second, std::int64_t half_width, std::size_t cap,
                Rng* rng) {
    MergeList out;
    if (first.empty() || second.empty()) return out;
    std::vector<std::uint32_t> order(second.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
        return second[x].residue < second[y].residue;
    });
    auto below = [&](std::int64_t bound) {
        return std::lower_bound(order.begin(), order.end(), bound,
                                [&](std::uint32_t idx, std::int64_t v) { return second[idx].residue < v; });
    };
    for (std::uint32_t i = 0; i < first.size(); ++i) {
        const std::int64_t a = first[i].residue;
        for (auto it = below(-half_width - a), end = below(half_width - a); it != end; ++it) {
            out.push_back({a + second[*it].residue, i, *it});
        }
    }
    if (cap > 0 && out.size() > cap) {
        if (!rng) throw InputError("merge needs an rng to down-sample");
        rng->partial_shuffle(std::span<MergeElement>(out), cap);
        out.resize(cap);
    }
    return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> match(const MergeList& first, const MergeList& second,
                                                           Rng& rng) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    if (first.empty() || second.empty()) return out;
    std::vector<std::uint32_t> sorted(first.size());
    std::iota(sorted.begin(), sorted.end(), 0u);
    std::sort(sorted.begin(), sorted.end(), [&](std::uint32_t x, std::uint32_t y) {
        return first[x].residue < first[y].residue;
    });
    std::vector<std::uint32_t> scan(second.size());
    std::iota(scan.begin(), scan.end(), 0u);
    rng.shuffle(std::span<std::uint32_t>(scan));
    for (auto j : scan) {
        const std::int64_t want = -second[j].residue;
        auto it = std::lower_bound(sorted.begin(), sorted.end(), want,
                                   [&](std::uint32_t idx, std::int64_t v) { return first[idx].residue < v; });
        for (; it != sorted.end() && first[*it].residue == want; ++it) out.emplace_back(*it, j);
    }
    return out;
}

nlohmann::json OracleTrace::to_json() const {
    return {{"level_sizes", level_sizes}, {"matches", matches}};
}

std::optional<ModularSolution> oracle(const std::vector<LeafList>& lists, const ModParams& params, Rng& rng,
                                      const OracleOptions& options, OracleTrace* trace) {
    if (lists.size() != params.k()) throw InputError("oracle needs exactly k lists");
    const std::size_t cap = options.cap_factor * params.list_size();

    // levels[0] are the leaf lists; levels[lambda] halves the count.
    std::vector<std::vector<MergeList>> levels(1);
    for (const auto& list : lists) levels[0].push_back(list.elements);
    if (trace) {
        trace->level_sizes.clear();
        trace->matches = 0;
    }
    auto record = [&](const std::vector<MergeList>& level) {
        if (!trace) return;
        std::vector<std::size_t> sizes;
        for (const auto& l : level) sizes.push_back(l.size());
        trace->level_sizes.push_back(std::move(sizes));
    };
    record(levels[0]);

    for (std::size_t level = 1; level < params.levels(); ++level) {
        const std::int64_t h = params.half_width(level);
        const auto& below = levels.back();
        std::vector<MergeList> next;
        for (std::size_t q = 0; q + 1 < below.size(); q += 2) {
            MergeList merged = merge(below[q], below[q + 1], h, cap, &rng);
            for (const auto& e : merged) {
                if (e.residue < -h || e.residue >= h) throw std::logic_error("merge output left its interval");
            }
            next.push_back(std::move(merged));
        }
        levels.push_back(std::move(next));
        record(levels.back());
        for (const auto& l : levels.back()) {
            if (l.empty()) return std::nullopt;
        }
    }

    const auto& top = levels.back();
    auto pairs = match(top[0], top[1], rng);
    if (trace) trace->matches = pairs.size();
    if (pairs.empty()) return std::nullopt;
    const auto [root_left, root_right] = pairs[rng.uniform(pairs.size())];

    // Walk provenance back down the ladder.
    std::vector<std::uint32_t> current = {root_left, root_right};
    for (std::size_t level = levels.size() - 1; level > 0; --level) {
        std::vector<std::uint32_t> below;
        below.reserve(current.size() * 2);
        for (std::size_t q = 0; q < current.size(); ++q) {
            const auto& e = levels[level][q][current[q]];
            below.push_back(e.left);
            below.push_back(e.right);
        }
        current = std::move(below);
    }

    ModularSolution solution;
    solution.choice.reserve(lists.size());
    std::int64_t total = 0;
    for (std::size_t j = 0; j < lists.size(); ++j) {
        const auto& leaf = lists[j].elements[current[j]];
        solution.choice.push_back(leaf.left);
        total = mod_add(total, mod_add(lists[j].sums[leaf.left], lists[j].offset, params.m()), params.m());
    }
    if (total != 0) throw std::logic_error("oracle output is not a modular solution");
    return solution;
}

BitVector solution_vector(const Instance& instance, const Division& division, const std::vector<LeafList>& lists,
                          const ModularSolution& solution) {
    BitVector x(instance.n());
    for (std::size_t j = 0; j < lists.size(); ++j) {
        const BlockMask mask = lists[j].subsets.at(solution.choice.at(j));
        for (auto i : mask_indices(division, lists[j].block, mask)) x.set(i);
    }
    return x;
}

bool is_viable(std::span<const std::int64_t> raw_residues, std::span<const std::int64_t> offsets,
               const ModParams& params) {
    if (raw_residues.size() != params.k() || offsets.size() != params.k()) {
        throw InputError("viability needs one residue and one offset per list");
    }
    std::vector<std::int64_t> sums;
    for (std::size_t j = 0; j < params.k(); ++j) sums.push_back(balanced(raw_residues[j] + offsets[j], params.m()));
    for (std::size_t level = 1; level < params.levels(); ++level) {
        const std::int64_t h = params.half_width(level);
        std::vector<std::int64_t> next;
        for (std::size_t q = 0; q + 1 < sums.size(); q += 2) {
            const std::int64_t s = sums[q] + sums[q + 1];
            if (s < -h || s >= h) return false;
            next.push_back(s);
        }
        sums = std::move(next);
    }
    return sums[0] + sums[1] == 0;
}

}  // namespace fwss
