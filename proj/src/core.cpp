#include "fwss/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fwss {

namespace {

const BigInt kInt64Headroom = BigInt(1) << 62;

void require_length(const Instance& instance, const BitVector& x) {
    if (x.size() != instance.n()) {
        throw InputError("solution length " + std::to_string(x.size()) + " does not match n = " +
                         std::to_string(instance.n()));
    }
}

void require_cap(std::uint64_t n, std::uint64_t ell, std::uint64_t cap) {
    if (binomial(n, ell) > cap) {
        throw ResourceError("C(" + std::to_string(n) + ", " + std::to_string(ell) +
                            ") exceeds the enumeration cap " + std::to_string(cap));
    }
}

BigInt random_bits(Rng& rng, unsigned bits) {
    BigInt out = 0;
    unsigned produced = 0;
    while (produced < bits) {
        std::uint64_t word = rng.next_u64();
        unsigned take = std::min(64u, bits - produced);
        if (take < 64) word &= (std::uint64_t{1} << take) - 1;
        out |= BigInt(word) << produced;
        produced += take;
    }
    return out;
}

// Uniform in [0, bound).
BigInt uniform_below(Rng& rng, const BigInt& bound) {
    unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(bound)) + 1;
    for (;;) {
        BigInt candidate = random_bits(rng, bits);
        if (candidate < bound) return candidate;
    }
}

// Visits weight-ell combinations of {0..n-1} in lexicographic order with the
// running value accumulated by `step`.  Stops early when visit returns true.
template <class V, class Step, class Visit>
bool combinations(std::size_t n, std::size_t ell, const V& zero, Step step, Visit visit) {
    std::vector<std::uint32_t> chosen(ell);
    auto dfs = [&](auto& self, std::size_t pos, std::size_t depth, const V& value) -> bool {
        if (depth == ell) return visit(std::span<const std::uint32_t>(chosen), value);
        for (std::size_t i = pos; i + (ell - depth) <= n; ++i) {
            chosen[depth] = static_cast<std::uint32_t>(i);
            if (self(self, i + 1, depth + 1, step(value, i))) return true;
        }
        return false;
    };
    return dfs(dfs, 0, 0, zero);
}

template <class V>
std::optional<BitVector> brute_force_with(const std::vector<V>& a, const V& t, std::size_t ell) {
    std::optional<BitVector> found;
    combinations(
        a.size(), ell, V(0), [&](const V& s, std::size_t i) { return V(s + a[i]); },
        [&](std::span<const std::uint32_t> idx, const V& s) {
            if (s != t) return false;
            found = BitVector::from_indices(a.size(), idx);
            return true;
        });
    return found;
}

template <class Visit>
void modular_combinations(const Instance& instance, std::uint64_t m, std::uint64_t cap, Visit visit) {
    if (m == 0) throw InputError("modulus must be at least 1");
    if (m > (std::uint64_t{1} << 63)) throw InputError("modulus must be at most 2^63");
    require_cap(instance.n(), instance.ell(), cap);
    auto a = instance.weights_mod(m);
    std::uint64_t t = instance.target_mod(m);
    combinations(
        a.size(), instance.ell(), std::uint64_t{0},
        [&](std::uint64_t s, std::size_t i) {
            std::uint64_t r = s + a[i];
            return r >= m ? r - m : r;
        },
        [&](std::span<const std::uint32_t> idx, std::uint64_t s) {
            if (s == t) visit(idx);
            return false;
        });
}

}  // namespace

BitVector::BitVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) {
        if (b > 1) throw InputError("bit vector entries must be 0 or 1");
    }
}

BitVector BitVector::from_string(std::string_view text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') throw InputError("solution string must contain only '0' and '1'");
        bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return BitVector(std::move(bits));
}

BitVector BitVector::from_indices(std::size_t n, std::span<const std::uint32_t> indices) {
    BitVector x(n);
    for (auto i : indices) {
        if (i >= n) throw InputError("index out of range");
        x.set(i);
    }
    return x;
}

std::size_t BitVector::weight() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<std::uint32_t> BitVector::indices() const {
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) out.push_back(static_cast<std::uint32_t>(i));
    }
    return out;
}

BitVector BitVector::complement() const {
    BitVector out(bits_.size());
    for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] ? 0 : 1;
    return out;
}

std::string BitVector::to_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) s[i] = '1';
    }
    return s;
}

Instance::Instance(std::vector<BigInt> weights, BigInt target, std::size_t ell)
    : weights_(std::move(weights)), target_(std::move(target)), ell_(ell) {
    if (weights_.empty()) throw InputError("instance needs at least one weight");
    if (ell_ > weights_.size()) throw InputError("ell must not exceed n");
    if (target_ < 0) throw InputError("target must be nonnegative");
    for (const auto& a : weights_) {
        if (a < 1) throw InputError("weights must be positive");
        total_ += a;
        if (a > max_) max_ = a;
    }
    fits_int64_ = total_ < kInt64Headroom && target_ < kInt64Headroom;
}

std::vector<std::int64_t> Instance::weights_int64() const {
    if (!fits_int64_) throw InputError("instance does not fit in 64-bit arithmetic");
    std::vector<std::int64_t> out;
    out.reserve(weights_.size());
    for (const auto& a : weights_) out.push_back(a.convert_to<std::int64_t>());
    return out;
}

std::int64_t Instance::target_int64() const {
    if (!fits_int64_) throw InputError("instance does not fit in 64-bit arithmetic");
    return target_.convert_to<std::int64_t>();
}

std::vector<std::uint64_t> Instance::weights_mod(std::uint64_t m) const {
    std::vector<std::uint64_t> out;
    out.reserve(weights_.size());
    for (const auto& a : weights_) out.push_back(BigInt(a % m).convert_to<std::uint64_t>());
    return out;
}

std::uint64_t Instance::target_mod(std::uint64_t m) const {
    return BigInt(target_ % m).convert_to<std::uint64_t>();
}

BigInt evaluate(const Instance& instance, const BitVector& x) {
    require_length(instance, x);
    BigInt sum = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i]) sum += instance.weight(i);
    }
    return sum;
}

bool is_solution(const Instance& instance, const BitVector& x) {
    require_length(instance, x);
    return x.weight() == instance.ell() && evaluate(instance, x) == instance.target();
}

bool is_subset_sum_solution(const Instance& instance, const BitVector& x) {
    return evaluate(instance, x) == instance.target();
}

double log2_big(const BigInt& value) {
    if (value <= 0) throw InputError("log2 of a nonpositive value");
    auto top = static_cast<long>(boost::multiprecision::msb(value));
    if (top < 63) return std::log2(value.convert_to<double>());
    auto shift = static_cast<unsigned>(top - 63);
    auto head = BigInt(value >> shift).convert_to<std::uint64_t>();
    return std::log2(static_cast<double>(head)) + static_cast<double>(shift);
}

BigInt binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    BigInt out = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        out *= n - k + i;
        out /= i;
    }
    return out;
}

DensityReport densities(const Instance& instance, const std::optional<BigInt>& modulus) {
    if (modulus && *modulus < 2) throw InputError("modulus must be at least 2");
    const double n = static_cast<double>(instance.n());
    const BigInt& big_a = instance.max_weight();
    // log2(1) = 0 would make every density infinite.
    const double log_a = big_a > 1 ? log2_big(big_a) : 1.0;
    const double log_choose = log2_big(binomial(instance.n(), instance.ell()));

    DensityReport report;
    report.density = n / log_a;
    report.information_density = log_choose / log_a;
    report.pseudo_density = static_cast<double>(instance.ell()) * std::log2(n) / log_a;
    if (modulus) {
        const double log_m = log2_big(*modulus);
        report.modular_density = n / log_m;
        report.modular_information_density = log_choose / log_m;
    }
    return report;
}

Instance gen_instance(std::size_t n, std::size_t ell, double density, Rng& rng, bool planted) {
    if (n == 0 || ell < 1 || ell > n) throw InputError("need 1 <= ell <= n");
    if (!(density > 0)) throw InputError("density must be positive");
    const auto bits = static_cast<unsigned>(std::ceil(static_cast<double>(n) / density));

    std::vector<BigInt> a;
    a.reserve(n);
    for (std::size_t i = 0; i < n; ++i) a.push_back(random_bits(rng, bits) + 1);

    BigInt t;
    if (planted) {
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        rng.partial_shuffle(std::span<std::uint32_t>(order), ell);
        for (std::size_t i = 0; i < ell; ++i) t += a[order[i]];
    } else {
        BigInt max_a = *std::max_element(a.begin(), a.end());
        t = uniform_below(rng, max_a * ell) + 1;
    }
    return Instance(std::move(a), std::move(t), ell);
}

Instance gen_unrestricted_instance(std::size_t n, double density, Rng& rng) {
    if (n == 0) throw InputError("need n >= 1");
    if (!(density > 0)) throw InputError("density must be positive");
    const auto bits = static_cast<unsigned>(std::ceil(static_cast<double>(n) / density));

    std::vector<BigInt> a;
    a.reserve(n);
    for (std::size_t i = 0; i < n; ++i) a.push_back(random_bits(rng, bits) + 1);

    BitVector x(n);
    while (x.weight() == 0) {
        for (std::size_t i = 0; i < n; ++i) x.set(i, rng.next_u64() & 1);
    }
    BigInt t = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i]) t += a[i];
    }
    return Instance(std::move(a), std::move(t), x.weight());
}

std::optional<BitVector> brute_force(const Instance& instance, std::uint64_t cap) {
    require_cap(instance.n(), instance.ell(), cap);
    if (instance.fits_int64()) {
        return brute_force_with(instance.weights_int64(), instance.target_int64(), instance.ell());
    }
    return brute_force_with(instance.weights(), instance.target(), instance.ell());
}

BigInt count_modular_solutions(const Instance& instance, std::uint64_t m, std::uint64_t cap) {
    std::uint64_t count = 0;
    modular_combinations(instance, m, cap, [&](std::span<const std::uint32_t>) { ++count; });
    return count;
}

std::vector<BitVector> enumerate_modular_solutions(const Instance& instance, std::uint64_t m,
                                                   std::uint64_t cap) {
    std::vector<BitVector> out;
    modular_combinations(instance, m, cap, [&](std::span<const std::uint32_t> idx) {
        out.push_back(BitVector::from_indices(instance.n(), idx));
    });
    return out;
}

Instance complement_transform(const Instance& instance) {
    if (instance.target() > instance.total()) {
        throw InputError("target exceeds the sum of all weights; complement target would be negative");
    }
    return Instance(instance.weights(), instance.total() - instance.target(),
                    instance.n() - instance.ell());
}

}  // namespace fwss
