#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fwss/rng.hpp"

namespace fwss {

using BigInt = boost::multiprecision::cpp_int;

// Malformed arguments: length mismatches, out-of-range parameters.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Algorithm parameters that cannot be honored for the given instance.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Enumeration caps, iteration or time budgets, I/O failures.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 26;

class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t n) : bits_(n, 0) {}
    explicit BitVector(std::vector<std::uint8_t> bits);

    // Parses a string of '0'/'1' characters.
    static BitVector from_string(std::string_view text);
    // Bit vector of length n with ones at the given indices.
    static BitVector from_indices(std::size_t n, std::span<const std::uint32_t> indices);

    std::size_t size() const { return bits_.size(); }
    bool operator[](std::size_t i) const { return bits_[i] != 0; }
    void set(std::size_t i, bool value = true) { bits_[i] = value ? 1 : 0; }

    std::size_t weight() const;
    std::vector<std::uint32_t> indices() const;
    BitVector complement() const;
    std::string to_string() const;

    friend bool operator==(const BitVector&, const BitVector&) = default;
    friend auto operator<=>(const BitVector&, const BitVector&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

using SolutionVector = BitVector;

// A fixed weight subset sum problem: find x of Hamming weight ell with
// sum a_i x_i = t.  Immutable after construction.
class Instance {
public:
    Instance(std::vector<BigInt> weights, BigInt target, std::size_t ell);

    std::size_t n() const { return weights_.size(); }
    std::size_t ell() const { return ell_; }
    const std::vector<BigInt>& weights() const { return weights_; }
    const BigInt& weight(std::size_t i) const { return weights_[i]; }
    const BigInt& target() const { return target_; }
    const BigInt& total() const { return total_; }
    const BigInt& max_weight() const { return max_; }

    // True when every subset sum and the target fit comfortably in int64.
    bool fits_int64() const { return fits_int64_; }
    std::vector<std::int64_t> weights_int64() const;
    std::int64_t target_int64() const;

    // Weights reduced mod m, in [0, m).
    std::vector<std::uint64_t> weights_mod(std::uint64_t m) const;
    std::uint64_t target_mod(std::uint64_t m) const;

    friend bool operator==(const Instance&, const Instance&) = default;

private:
    std::vector<BigInt> weights_;
    BigInt target_;
    std::size_t ell_;
    BigInt total_;
    BigInt max_;
    bool fits_int64_ = false;
};

struct DensityReport {
    double density = 0;
    std::optional<double> modular_density;
    double information_density = 0;
    std::optional<double> modular_information_density;
    double pseudo_density = 0;
};

BigInt evaluate(const Instance& instance, const BitVector& x);
bool is_solution(const Instance& instance, const BitVector& x);
// Unrestricted-weight variant: sum equals the target, any Hamming weight.
bool is_subset_sum_solution(const Instance& instance, const BitVector& x);

// log2 of a positive big integer, from its bit length and leading 64 bits.
double log2_big(const BigInt& value);

BigInt binomial(std::uint64_t n, std::uint64_t k);

DensityReport densities(const Instance& instance, const std::optional<BigInt>& modulus = std::nullopt);

// Weights uniform in [1, 2^ceil(n/density)].  With planted=true the target
// is the sum of a uniformly random weight-ell subset; otherwise t is uniform
// in [1, ell * max a_i].
Instance gen_instance(std::size_t n, std::size_t ell, double density, Rng& rng, bool planted);
// Planted instance for the unrestricted-weight experiments: the hidden x is
// uniform over nonzero bit vectors and ell records its weight.
Instance gen_unrestricted_instance(std::size_t n, double density, Rng& rng);

// First weight-ell solution in lexicographic combination order.
std::optional<BitVector> brute_force(const Instance& instance,
                                     std::uint64_t cap = kDefaultEnumerationCap);

// Number of weight-ell x with sum a_i x_i = t (mod m).  m >= 1.
BigInt count_modular_solutions(const Instance& instance, std::uint64_t m,
                               std::uint64_t cap = kDefaultEnumerationCap);
std::vector<BitVector> enumerate_modular_solutions(const Instance& instance, std::uint64_t m,
                                                   std::uint64_t cap = kDefaultEnumerationCap);

// (a, t, ell) -> (a, sum a - t, n - ell).  Solutions map by x -> 1 - x.
Instance complement_transform(const Instance& instance);

}  // namespace fwss
