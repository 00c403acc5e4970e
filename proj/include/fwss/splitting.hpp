#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fwss/core.hpp"
#include "fwss/rng.hpp"
#include "json.hpp"

namespace fwss {

using Rational = boost::multiprecision::cpp_rational;

// Shape of an (n, ell, k) splitting system.  Blocks 1..k-1 have floor(n/k)
// indices and target weight floor(ell/k); the last block absorbs both
// remainders.
class SplitParams {
public:
    SplitParams(std::size_t n, std::size_t ell, std::size_t k);

    std::size_t n() const { return n_; }
    std::size_t ell() const { return ell_; }
    std::size_t k() const { return k_; }
    std::size_t base_size() const { return n_ / k_; }
    std::size_t base_weight() const { return ell_ / k_; }
    std::size_t r1() const { return n_ - k_ * base_size(); }
    std::size_t r2() const { return ell_ - k_ * base_weight(); }
    bool divisible() const { return r1() == 0 && r2() == 0; }

    std::size_t block_size(std::size_t j) const { return j + 1 == k_ ? base_size() + r1() : base_size(); }
    std::size_t block_weight(std::size_t j) const {
        return j + 1 == k_ ? base_weight() + r2() : base_weight();
    }

private:
    std::size_t n_;
    std::size_t ell_;
    std::size_t k_;
};

struct Division {
    // Sorted index lists, one per block.  Together they partition {0..n-1}.
    std::vector<std::vector<std::uint32_t>> blocks;
    // Target Hamming weight per block.
    std::vector<std::size_t> weights;

    std::size_t k() const { return blocks.size(); }
    friend bool operator==(const Division&, const Division&) = default;
};

// Throws std::logic_error unless `division` partitions {0..n-1} with the
// block sizes and weights `params` mandates.
void check_partition(const Division& division, const SplitParams& params);

// Uniformly random ordered partition into blocks of sizes floor(n/k), ...,
// floor(n/k) + r1.  Block weights are left at zero.
Division random_partition(std::size_t n, std::size_t k, Rng& rng);
Division random_division(const SplitParams& params, Rng& rng);

// |Y ∩ I_j| == w_j for every block.
bool is_good(const Division& division, std::span<const std::uint32_t> subset);

// Probability that a uniformly random ordered division is good for a fixed
// weight-ell subset.  Divisible shapes only.
Rational good_probability_exact(const SplitParams& params);

// |B_i ∩ Y| - floor(ell/k), where B_i holds floor(n/k) consecutive entries
// of `order` starting at position i (cyclically).  An empty order means the
// identity 0..n-1.
long nu(const SplitParams& params, std::span<const std::uint32_t> subset, std::size_t i,
        std::span<const std::uint32_t> order = {});

// Lazily enumerates the cyclic-window construction: I_1 ranges over the
// windows of the index list, the chosen window moves to the tail, I_2 ranges
// over windows of the remaining indices, and so on through I_{k-1}.  For
// every weight-ell Y some emitted division is good.
class DeterministicDivisions {
public:
    // trim_last_stage drops the redundant half of the last stage's windows
    // (divisible shapes only).
    explicit DeterministicDivisions(const SplitParams& params, bool trim_last_stage = false);

    std::optional<Division> next();
    std::uint64_t emitted() const { return emitted_; }

    // n (n - floor(n/k)) ... (n - (k-2) floor(n/k)).
    static std::uint64_t stream_length(const SplitParams& params);

private:
    Division build() const;

    SplitParams params_;
    std::vector<std::size_t> choice_;
    std::vector<std::size_t> radix_;
    bool done_ = false;
    std::uint64_t emitted_ = 0;
};

// The window stream above, followed by a fallback phase for shapes where the
// window argument can fail (it needs every stage's window average within one
// of floor(ell/k), which breaks when the last block holds two or more spare
// units of weight).  The fallback picks the last block S first and runs the
// divisible (k-1)-block window construction on the remaining indices.
//
// Candidates for S: cyclic arithmetic progressions with stride >= 2 (the
// evenly spread subsets the windows tend to miss), then a chain of sets in
// which consecutive members differ by one swap.  The chain passes through
// every cyclic window of size |S| and through a family that, for every Y,
// contains a set on the far side of w_k from the window average, so
// |S ∩ Y| takes the value w_k somewhere along it.  Whenever a good division
// exists for Y, one is emitted.
class CompleteDivisions {
public:
    explicit CompleteDivisions(const SplitParams& params);

    std::optional<Division> next();
    std::uint64_t emitted() const { return emitted_; }
    bool in_fallback() const { return in_fallback_; }

    static bool needs_fallback(const SplitParams& params);

private:
    bool next_candidate();
    std::optional<std::uint64_t> next_progression();
    std::optional<std::uint64_t> next_chain();
    std::optional<std::uint64_t> next_anchor();
    void start_inner();

    SplitParams params_;
    DeterministicDivisions windows_;
    bool in_fallback_ = false;
    bool done_ = false;
    std::size_t size_ = 0;                 // |I_k|
    std::vector<std::uint32_t> last_;      // current candidate for I_k
    std::vector<std::uint32_t> rest_;      // its complement, ascending
    std::optional<DeterministicDivisions> inner_;
    std::unordered_set<std::uint64_t> seen_;

    std::vector<std::size_t> steps_;  // progression strides, in trial order
    std::size_t step_ = 0, start_ = 0;

    std::uint64_t cur_ = 0, target_ = 0;
    bool chain_started_ = false;
    std::size_t window_ = 0;
    std::size_t need_ = 0;  // members of the covering family hold this many pool indices
    std::vector<std::pair<std::uint32_t, std::uint32_t>> groups_;
    std::size_t group_ = 0;
    std::vector<std::uint32_t> comb_;
    std::uint64_t emitted_ = 0;
};

class DivisionSource {
public:
    virtual ~DivisionSource() = default;
    virtual std::optional<Division> next() = 0;
    virtual std::string name() const = 0;
};

class DeterministicSource final : public DivisionSource {
public:
    explicit DeterministicSource(const SplitParams& params) : stream_(params) {}
    std::optional<Division> next() override { return stream_.next(); }
    std::string name() const override { return "deterministic"; }

private:
    CompleteDivisions stream_;
};

// Endless stream of independent random divisions.
class RandomSource final : public DivisionSource {
public:
    RandomSource(const SplitParams& params, Rng rng) : params_(params), rng_(rng) {}
    std::optional<Division> next() override { return random_division(params_, rng_); }
    std::string name() const override { return "random"; }

private:
    SplitParams params_;
    Rng rng_;
};

nlohmann::json division_to_json(const Division& division);

}  // namespace fwss
