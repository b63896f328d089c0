#pragma once

#include <cmath>
#include <cstdint>

namespace stqp {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives a child seed from a parent seed and a list of integer labels.
/// Used to key replications, rows and sub-campaigns deterministically.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) noexcept {
    return mix64(seed ^ mix64(label + 0x9e3779b97f4a7c15ULL));
}

/**
 * Counter-based random stream keyed by (global seed, stream id, draw index).
 *
 * Draw i of stream s is a pure function of (seed, s, i), so any worker can
 * reproduce any replication without sharing generator state. The output
 * function is the splitmix64 finalizer applied to key + (i+1)*golden, i.e.
 * stream s is a splitmix64 sequence started at a key hashed from (seed, s).
 */
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : seed_(seed), stream_id_(stream_id), key_(derive_seed(seed, stream_id)) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }
    std::uint64_t position() const noexcept { return counter_; }

    /// Raw 64-bit draw; advances the counter.
    std::uint64_t next_u64() noexcept {
        ++counter_;
        return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform on the open interval (0,1); never returns 0 or 1.
    double uniform_open() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Unit-rate exponential.
    double exponential() noexcept { return -std::log(uniform_open()); }

    /// Standard normal (Marsaglia polar method).
    double normal() noexcept;

    /// Gamma(shape, 1) for shape >= 1 (Marsaglia-Tsang).
    double gamma(double shape) noexcept;

    /// Independent child stream.
    Stream split(std::uint64_t label) const noexcept {
        return Stream(derive_seed(key_, label), stream_id_);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

inline double Stream::normal() noexcept {
    for (;;) {
        const double v1 = 2.0 * uniform_open() - 1.0;
        const double v2 = 2.0 * uniform_open() - 1.0;
        const double s = v1 * v1 + v2 * v2;
        if (s > 0.0 && s < 1.0) {
            return v1 * std::sqrt(-2.0 * std::log(s) / s);
        }
    }
}

inline double Stream::gamma(double shape) noexcept {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z;
        double v;
        do {
            z = normal();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open();
        if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
        if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace stqp
