#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace diskperc {

// SplitMix64 finalizer; also used to derive substream keys.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based generator: output k of stream (seed, stream) is
/// mix64(key + (k + 1) * golden). Replica streams therefore never depend on
/// which worker ran them or in which order.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(mix64(mix64(seed ^ 0x6a09e667f3bcc909ULL) + stream * 0x9e3779b97f4a7c15ULL)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        ++counter_;
        return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
    }

    /// Independent child stream, e.g. one per sub-task of a replica.
    [[nodiscard]] CounterRng split(std::uint64_t tag) const noexcept {
        return CounterRng(key_, tag + 0x5851f42d4c957f2dULL);
    }

    [[nodiscard]] std::uint64_t draws() const noexcept { return counter_; }

    /// Uniform on (0,1), never exactly 0 or 1.
    double uniform() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() noexcept {
        // Marsaglia polar method without caching keeps the draw count a pure
        // function of the call sequence.
        for (;;) {
            const double a = 2.0 * uniform() - 1.0;
            const double b = 2.0 * uniform() - 1.0;
            const double s = a * a + b * b;
            if (s < 1.0 && s > 0.0) return a * std::sqrt(-2.0 * std::log(s) / s);
        }
    }

    double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

    std::uint64_t poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        std::poisson_distribution<std::uint64_t> d(mean);
        return d(*this);
    }

    double gamma(double shape, double scale) {
        std::gamma_distribution<double> d(shape, scale);
        return d(*this);
    }

    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) noexcept {
        // Lemire's multiply-shift; the tiny bias of skipping rejection is
        // below 2^-32 for the bounds used here.
        const unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Hands out 2-bit nearest-neighbour directions, 32 per 64-bit draw.
class DirectionStream {
public:
    explicit DirectionStream(CounterRng& rng) noexcept : rng_(rng) {}

    int next() noexcept {
        if (left_ == 0) {
            bits_ = rng_();
            left_ = 32;
        }
        const int d = static_cast<int>(bits_ & 3U);
        bits_ >>= 2;
        --left_;
        return d;
    }

private:
    CounterRng& rng_;
    std::uint64_t bits_ = 0;
    int left_ = 0;
};

}  // namespace diskperc
