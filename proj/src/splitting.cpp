#include "fwss/splitting.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace fwss {

namespace {

BigInt factorial(std::uint64_t n) {
    BigInt out = 1;
    for (std::uint64_t i = 2; i <= n; ++i) out *= i;
    return out;
}

// n! / ((n/k)!)^k: ordered ways to cut n items into k equal blocks.
BigInt multinomial_equal(std::uint64_t n, std::uint64_t k) {
    return factorial(n) / boost::multiprecision::pow(factorial(n / k), static_cast<unsigned>(k));
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    if (b != 0 && a > UINT64_MAX / b) throw ParameterError("deterministic stream length overflows 64 bits");
    return a * b;
}

}  // namespace

SplitParams::SplitParams(std::size_t n, std::size_t ell, std::size_t k) : n_(n), ell_(ell), k_(k) {
    if (k_ < 2) throw ParameterError("splitting needs k >= 2");
    if (k_ > n_ || k_ > ell_) {
        throw ParameterError("splitting needs k <= ell <= n (got n=" + std::to_string(n_) +
                             ", ell=" + std::to_string(ell_) + ", k=" + std::to_string(k_) + ")");
    }
    if (ell_ > n_) throw ParameterError("ell must not exceed n");
}

void check_partition(const Division& division, const SplitParams& params) {
    if (division.blocks.size() != params.k() || division.weights.size() != params.k()) {
        throw std::logic_error("division has the wrong number of blocks");
    }
    std::vector<std::uint8_t> seen(params.n(), 0);
    std::size_t weight_sum = 0;
    for (std::size_t j = 0; j < params.k(); ++j) {
        const auto& block = division.blocks[j];
        if (block.size() != params.block_size(j) || division.weights[j] != params.block_weight(j)) {
            throw std::logic_error("block " + std::to_string(j) + " has the wrong size or weight");
        }
        for (auto i : block) {
            if (i >= params.n() || seen[i]) throw std::logic_error("blocks do not partition the index set");
            seen[i] = 1;
        }
        weight_sum += division.weights[j];
    }
    if (weight_sum != params.ell()) throw std::logic_error("block weights do not sum to ell");
}

Division random_partition(std::size_t n, std::size_t k, Rng& rng) {
    if (k < 1 || k > n) throw ParameterError("partition needs 1 <= k <= n");
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    rng.shuffle(std::span<std::uint32_t>(order));

    Division d;
    d.blocks.resize(k);
    d.weights.assign(k, 0);
    const std::size_t base = n / k;
    auto it = order.begin();
    for (std::size_t j = 0; j < k; ++j) {
        std::size_t size = j + 1 == k ? n - base * (k - 1) : base;
        d.blocks[j].assign(it, it + static_cast<std::ptrdiff_t>(size));
        std::sort(d.blocks[j].begin(), d.blocks[j].end());
        it += static_cast<std::ptrdiff_t>(size);
    }
    return d;
}

Division random_division(const SplitParams& params, Rng& rng) {
    Division d = random_partition(params.n(), params.k(), rng);
    for (std::size_t j = 0; j < params.k(); ++j) d.weights[j] = params.block_weight(j);
    return d;
}

bool is_good(const Division& division, std::span<const std::uint32_t> subset) {
    std::size_t ell = std::accumulate(division.weights.begin(), division.weights.end(), std::size_t{0});
    if (subset.size() != ell) {
        throw InputError("subset has size " + std::to_string(subset.size()) + ", expected ell = " +
                         std::to_string(ell));
    }
    std::size_t n = 0;
    for (const auto& block : division.blocks) n += block.size();
    std::vector<std::uint8_t> member(n, 0);
    for (auto i : subset) {
        if (i >= n) throw InputError("subset index out of range");
        member[i] = 1;
    }
    for (std::size_t j = 0; j < division.blocks.size(); ++j) {
        std::size_t hits = 0;
        for (auto i : division.blocks[j]) hits += member[i];
        if (hits != division.weights[j]) return false;
    }
    return true;
}

Rational good_probability_exact(const SplitParams& params) {
    if (!params.divisible()) throw InputError("exact good-division probability needs k | n and k | ell");
    const std::uint64_t n = params.n(), ell = params.ell(), k = params.k();
    BigInt good = multinomial_equal(ell, k) * multinomial_equal(n - ell, k);
    return Rational(good, multinomial_equal(n, k));
}

long nu(const SplitParams& params, std::span<const std::uint32_t> subset, std::size_t i,
        std::span<const std::uint32_t> order) {
    std::vector<std::uint32_t> identity;
    if (order.empty()) {
        identity.resize(params.n());
        std::iota(identity.begin(), identity.end(), 0u);
        order = identity;
    }
    const std::size_t len = order.size();
    std::vector<std::uint8_t> member(params.n(), 0);
    for (auto y : subset) {
        if (y >= params.n()) throw InputError("subset index out of range");
        member[y] = 1;
    }
    long hits = 0;
    for (std::size_t j = 0; j < params.base_size(); ++j) hits += member[order[(i + j) % len]];
    return hits - static_cast<long>(params.base_weight());
}

DeterministicDivisions::DeterministicDivisions(const SplitParams& params, bool trim_last_stage)
    : params_(params), choice_(params.k() - 1, 0), radix_(params.k() - 1) {
    for (std::size_t j = 0; j + 1 < params.k(); ++j) radix_[j] = params.n() - j * params.base_size();
    // With two equal blocks left, the windows starting at i and i + b are
    // complements, so their weights straddle w and the first b starts suffice.
    if (trim_last_stage && params.r1() == 0 && params.r2() == 0) radix_.back() = params.base_size();
}

std::uint64_t DeterministicDivisions::stream_length(const SplitParams& params) {
    std::uint64_t total = 1;
    for (std::size_t j = 0; j + 1 < params.k(); ++j) {
        total = checked_mul(total, params.n() - j * params.base_size());
    }
    return total;
}

Division DeterministicDivisions::build() const {
    const std::size_t b = params_.base_size();
    std::vector<std::uint32_t> current(params_.n());
    std::iota(current.begin(), current.end(), 0u);

    Division d;
    d.blocks.reserve(params_.k());
    for (std::size_t level = 0; level + 1 < params_.k(); ++level) {
        const std::size_t len = current.size();
        const std::size_t start = choice_[level];
        std::vector<std::uint32_t> window, rest;
        window.reserve(b);
        rest.reserve(len - b);
        if (start + b <= len) {
            window.assign(current.begin() + start, current.begin() + start + b);
            rest.assign(current.begin(), current.begin() + start);
            rest.insert(rest.end(), current.begin() + start + b, current.end());
        } else {
            const std::size_t wrap = start + b - len;
            window.assign(current.begin() + start, current.end());
            window.insert(window.end(), current.begin(), current.begin() + wrap);
            rest.assign(current.begin() + wrap, current.begin() + start);
        }
        std::sort(window.begin(), window.end());
        d.blocks.push_back(std::move(window));
        current = std::move(rest);
    }
    std::sort(current.begin(), current.end());
    d.blocks.push_back(std::move(current));
    for (std::size_t j = 0; j < params_.k(); ++j) d.weights.push_back(params_.block_weight(j));
    return d;
}

std::optional<Division> DeterministicDivisions::next() {
    if (done_) return std::nullopt;
    Division d = build();
    ++emitted_;
    // Odometer over window starts, innermost level fastest.
    std::size_t level = choice_.size();
    while (level > 0) {
        --level;
        if (++choice_[level] < radix_[level]) break;
        choice_[level] = 0;
        if (level == 0) done_ = true;
    }
    return d;
}

namespace {

bool next_combination(std::vector<std::uint32_t>& c, std::size_t n) {
    const std::size_t s = c.size();
    std::size_t i = s;
    while (i > 0 && c[i - 1] == n - s + (i - 1)) --i;
    if (i == 0) return false;
    ++c[i - 1];
    for (std::size_t j = i; j < s; ++j) c[j] = c[j - 1] + 1;
    return true;
}

std::uint64_t bit(std::size_t i) { return std::uint64_t{1} << i; }

std::uint64_t lowest(std::uint64_t m) { return m & (~m + 1); }

}  // namespace

CompleteDivisions::CompleteDivisions(const SplitParams& params) : params_(params), windows_(params) {
    const std::size_t n = params.n(), ell = params.ell();
    size_ = params.block_size(params.k() - 1);
    if (!needs_fallback(params)) return;
    for (std::size_t d = 2; d <= n / 2; ++d) steps_.push_back(d);
    // Progressions that wrap the whole cycle about once come first.
    auto gap = [&](std::size_t d) { return d * size_ > n ? d * size_ - n : n - d * size_; };
    std::stable_sort(steps_.begin(), steps_.end(), [&](std::size_t a, std::size_t b) { return gap(a) < gap(b); });

    // Windows of size |S| have average weight |S| ell / n.  When c = w_k lies
    // above that, the chain also needs a set meeting Y in at least c indices;
    // below it, a set meeting the complement in at least |S| - c.  Split the
    // indices into g groups with g (need - 1) < pool: some group then holds
    // `need` pool indices, and the family takes every need-subset of every
    // group.
    const std::size_t c = params.block_weight(params.k() - 1);
    std::size_t pool = 0;
    if (size_ * ell < c * n) {
        need_ = c;
        pool = ell;
    } else if (size_ * ell > c * n) {
        need_ = size_ - c;
        pool = n - ell;
    }
    if (need_ <= 1) return;  // some window already reaches the far side
    const std::size_t g = std::min(n, (pool - 1) / (need_ - 1));
    for (std::size_t j = 0; j < g; ++j) {
        groups_.emplace_back(static_cast<std::uint32_t>(j * n / g), static_cast<std::uint32_t>((j + 1) * n / g));
    }
}

bool CompleteDivisions::needs_fallback(const SplitParams& params) {
    const std::size_t last = params.k() - 1;
    if (params.block_weight(last) > params.block_size(last)) return false;
    // Stage averages stay within one of w while |b r2 - w r1| < 2b + r1.
    const auto b = static_cast<long long>(params.base_size());
    const auto w = static_cast<long long>(params.base_weight());
    const auto r1 = static_cast<long long>(params.r1());
    const auto r2 = static_cast<long long>(params.r2());
    return std::llabs(b * r2 - w * r1) >= 2 * b + r1;
}

std::optional<std::uint64_t> CompleteDivisions::next_progression() {
    const std::size_t n = params_.n();
    while (step_ < steps_.size()) {
        const std::size_t start = start_, step = steps_[step_];
        if (++start_ == n) {
            start_ = 0;
            ++step_;
        }
        std::uint64_t m = 0;
        for (std::size_t j = 0; j < size_; ++j) m |= bit((start + j * step) % n);
        if (static_cast<std::size_t>(std::popcount(m)) == size_) return m;
    }
    return std::nullopt;
}

// Cyclic windows of size |S|, then the covering family.
std::optional<std::uint64_t> CompleteDivisions::next_anchor() {
    const std::size_t n = params_.n();
    if (window_ < n) {
        std::uint64_t m = 0;
        for (std::size_t j = 0; j < size_; ++j) m |= bit((window_ + j) % n);
        ++window_;
        return m;
    }
    while (group_ < groups_.size()) {
        const auto [lo, hi] = groups_[group_];
        if (hi - lo < need_) {
            ++group_;
            continue;
        }
        if (comb_.empty()) {
            comb_.resize(need_);
            std::iota(comb_.begin(), comb_.end(), 0u);
        } else if (!next_combination(comb_, hi - lo)) {
            comb_.clear();
            ++group_;
            continue;
        }
        std::uint64_t m = 0;
        for (auto i : comb_) m |= bit(lo + i);
        for (std::size_t i = 0; static_cast<std::size_t>(std::popcount(m)) < size_; ++i) m |= bit(i);
        return m;
    }
    return std::nullopt;
}

// Walks from anchor to anchor one swap at a time.
std::optional<std::uint64_t> CompleteDivisions::next_chain() {
    while (cur_ == target_) {
        auto anchor = next_anchor();
        if (!anchor) return std::nullopt;
        target_ = *anchor;
        if (!chain_started_) {
            chain_started_ = true;
            cur_ = target_;
            return cur_;
        }
    }
    cur_ = (cur_ & ~lowest(cur_ & ~target_)) | lowest(target_ & ~cur_);
    return cur_;
}

bool CompleteDivisions::next_candidate() {
    for (;;) {
        auto m = next_progression();
        if (!m) m = next_chain();
        if (!m) return false;
        if (!seen_.insert(*m).second) continue;
        last_.clear();
        for (std::uint32_t i = 0; i < params_.n(); ++i) {
            if (*m & bit(i)) last_.push_back(i);
        }
        return true;
    }
}

void CompleteDivisions::start_inner() {
    rest_.clear();
    std::size_t p = 0;
    for (std::uint32_t i = 0; i < params_.n(); ++i) {
        if (p < last_.size() && last_[p] == i) {
            ++p;
        } else {
            rest_.push_back(i);
        }
    }
    const std::size_t k = params_.k();
    inner_.emplace(SplitParams(rest_.size(), (k - 1) * params_.base_weight(), k - 1), true);
}

std::optional<Division> CompleteDivisions::next() {
    if (done_) return std::nullopt;
    if (!in_fallback_) {
        if (auto d = windows_.next()) {
            ++emitted_;
            return d;
        }
        if (!needs_fallback(params_) || !next_candidate()) {
            done_ = true;
            return std::nullopt;
        }
        in_fallback_ = true;
        start_inner();
    }
    std::optional<Division> inner = inner_->next();
    while (!inner) {
        if (!next_candidate()) {
            done_ = true;
            return std::nullopt;
        }
        start_inner();
        inner = inner_->next();
    }
    Division d;
    for (const auto& block : inner->blocks) {
        std::vector<std::uint32_t> mapped;
        mapped.reserve(block.size());
        for (auto i : block) mapped.push_back(rest_[i]);
        d.blocks.push_back(std::move(mapped));
    }
    d.blocks.push_back(last_);
    for (std::size_t j = 0; j < params_.k(); ++j) d.weights.push_back(params_.block_weight(j));
    ++emitted_;
    return d;
}

nlohmann::json division_to_json(const Division& division) {
    return {{"blocks", division.blocks}, {"weights", division.weights}};
}

}  // namespace fwss
