#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace fwss {

// Counter-based generator (Philox4x32-10).  The output sequence is a pure
// function of (seed, stream, position), so reports reproduce bit-for-bit on
// any platform.  Distributions are implemented here as well; the standard
// library's distributions are implementation-defined.
class Rng {
public:
    using result_type = std::uint64_t;

    static constexpr const char* kName = "philox4x32-10/v1";

    explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    // Independent child stream.  Same (parent, index) always gives the same child.
    Rng split(std::uint64_t index) const;

    std::uint64_t next_u64();
    result_type operator()() { return next_u64(); }
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    // Uniform in [0, bound).  bound must be nonzero.
    std::uint64_t uniform(std::uint64_t bound);
    // Uniform in [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    // Uniform double in [0, 1) with 53 random bits.
    double uniform_real();

    template <class T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    // Moves a uniformly random `count`-subset of items to the front (in
    // random order).  Cheaper than a full shuffle when count is small.
    template <class T>
    void partial_shuffle(std::span<T> items, std::size_t count) {
        for (std::size_t i = 0; i < count && i + 1 < items.size(); ++i) {
            std::size_t j = i + static_cast<std::size_t>(uniform(items.size() - i));
            std::swap(items[i], items[j]);
        }
    }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    unsigned buffered_ = 0;
};

}  // namespace fwss
