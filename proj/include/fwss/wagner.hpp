#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fwss/core.hpp"
#include "fwss/rng.hpp"
#include "fwss/splitting.hpp"
#include "fwss/ss4.hpp"
#include "json.hpp"

namespace fwss {

// Largest supported modulus; sums of two balanced residues stay exact.
inline constexpr std::int64_t kMaxModulus = std::int64_t{1} << 62;

// Representative of x mod m in [-floor(m/2), ceil(m/2)).
std::int64_t balanced(std::int64_t x, std::int64_t m);

// floor(value^(1/degree)) for nonnegative big integers.
BigInt integer_root(const BigInt& value, unsigned degree);

enum class ListMode { fixed_weight, unrestricted };

// Parameters of the k-set oracle over Z/mZ.  With L = log2 k and
// p = m^(-1/(L+1)), level lambda keeps integer sums in [-h_lambda, h_lambda)
// where h_lambda = floor(floor(m p^lambda) / 2), computed exactly.
class ModParams {
public:
    ModParams(std::int64_t m, std::size_t k, double alpha = 4.0);

    std::int64_t m() const { return m_; }
    std::size_t k() const { return k_; }
    std::size_t levels() const { return levels_; }
    double p() const { return p_; }
    double alpha() const { return alpha_; }
    std::int64_t half_width(std::size_t level) const { return half_widths_.at(level); }
    const std::vector<std::int64_t>& half_widths() const { return half_widths_; }
    // ceil(alpha / p), raised if needed so that N > 1/p.
    std::size_t list_size() const { return list_size_; }
    // Smallest N with N > 1/p.
    std::size_t min_list_size() const { return min_list_size_; }
    // 3k/4 - 1 for k >= 4; none for k = 2.
    std::size_t randomizer_count() const { return k_ >= 4 ? 3 * k_ / 4 - 1 : 0; }

private:
    std::int64_t m_;
    std::size_t k_;
    std::size_t levels_;
    double alpha_;
    double p_;
    std::vector<std::int64_t> half_widths_;
    std::size_t list_size_;
    std::size_t min_list_size_;
};

// Residue plus provenance.  In a leaf list `left` is the subset index and
// `right` is unused; after a merge both index into the two input lists.
struct MergeElement {
    std::int64_t residue = 0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;

    friend bool operator==(const MergeElement&, const MergeElement&) = default;
    friend auto operator<=>(const MergeElement&, const MergeElement&) = default;
};

using MergeList = std::vector<MergeElement>;

// One list L_j: distinct subsets of block j with their sums mod m and the
// offset (randomizers, folded target) applied to every element.
struct LeafList {
    std::size_t block = 0;
    std::vector<BlockMask> subsets;
    std::vector<std::int64_t> sums;  // in [0, m)
    std::int64_t offset = 0;         // in [0, m)
    MergeList elements;              // residue = balanced(sum + offset)

    void refresh(std::int64_t m);
};

using RandomizerSet = std::vector<std::int64_t>;

struct BuildOptions {
    ListMode mode = ListMode::fixed_weight;
    // Permit lists shorter than 1/p when a block has too few subsets.
    bool allow_short_lists = false;
};

// Number of distinct subsets block j can supply.
BigInt block_capacity(const Division& division, std::size_t j, ListMode mode);

// k lists of distinct random block subsets; the last list has -t folded in.
// A block with fewer subsets than the list size contributes all of them.
std::vector<LeafList> build_lists(const Instance& instance, const Division& division, const ModParams& params,
                                  Rng& rng, const BuildOptions& options = {});

// Lists holding every admissible subset of each block, target folded in.
std::vector<LeafList> build_full_lists(const Instance& instance, const Division& division,
                                       const ModParams& params, ListMode mode = ListMode::fixed_weight);

RandomizerSet draw_randomizers(const ModParams& params, Rng& rng);

// Offset added to each list: +r, +r', -r, -r' within every 4-sum, then +r
// on list 2^j i + 2^(j-1) and -r on list 2^j i + 2^j for each 2^j-sum.
std::vector<std::int64_t> randomizer_offsets(const ModParams& params, const RandomizerSet& randomizers);

void apply_randomizers(std::vector<LeafList>& lists, const RandomizerSet& randomizers, const ModParams& params);

// All a + b (over Z) with -h <= a + b < h.  With cap > 0 a larger result is
// down-sampled uniformly to cap elements (rng required).
MergeList merge(const MergeList& first, const MergeList& second, std::int64_t half_width, std::size_t cap = 0,
                Rng* rng = nullptr);

// All (i, j) with first[i] + second[j] == 0 over Z; second is scanned in a
// random order.
std::vector<std::pair<std::uint32_t, std::uint32_t>> match(const MergeList& first, const MergeList& second,
                                                           Rng& rng);

struct OracleOptions {
    std::size_t cap_factor = 8;  // 0: keep every in-interval sum
};

struct OracleTrace {
    std::vector<std::vector<std::size_t>> level_sizes;
    std::size_t matches = 0;

    nlohmann::json to_json() const;
};

// Index of the chosen subset in each leaf list.
struct ModularSolution {
    std::vector<std::uint32_t> choice;
};

// Merge ladder then a final match; returns one match chosen uniformly at
// random, or nothing when a level or the match comes up empty.
std::optional<ModularSolution> oracle(const std::vector<LeafList>& lists, const ModParams& params, Rng& rng,
                                      const OracleOptions& options = {}, OracleTrace* trace = nullptr);

// Global bit vector of the chosen subsets.
BitVector solution_vector(const Instance& instance, const Division& division,
                          const std::vector<LeafList>& lists, const ModularSolution& solution);

// Analysis predicate: after shifting each raw residue by its list offset,
// every integer 2^i-sum (1 <= i < log2 k) lies in its interval and the
// full integer sum is zero.
bool is_viable(std::span<const std::int64_t> raw_residues, std::span<const std::int64_t> offsets,
               const ModParams& params);

}  // namespace fwss
