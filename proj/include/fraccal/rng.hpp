#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string_view>

namespace fraccal {

namespace detail {
// Philox4x32 bijection with 10 rounds.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);
}  // namespace detail

/**
 * Counter-based generator (Philox4x32-10) with named substreams.
 *
 * A stream is identified by (seed, stream id); output block n is the Philox
 * bijection of counter (n, stream id) under a key derived from the seed, so
 * distinct substreams never share counters. substream(name) derives a child
 * stream id from the parent id and the name, which makes the layout of
 * draws independent of the order in which substreams are created.
 */
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()();

    Rng substream(std::string_view name) const;
    Rng substream(std::uint64_t index) const;

    // Uniform on [0,1).
    double uniform();
    double normal();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int cursor_ = 4;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace fraccal
