#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace specbox {

/// Seedable, splittable random stream.
///
/// Every stochastic operation in the library takes an explicit stream, and
/// derived streams depend only on (key, index), never on how much of the
/// parent stream has been consumed. This keeps shot-parallel runs
/// bit-reproducible: the stream for shot s is always root.derive(s).
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : key_(mix(seed ^ kRootSalt)) { engine_.seed(key_); }

    /// Child stream identified by index; independent of this stream's state.
    RngStream derive(std::uint64_t index) const { return RngStream(key_, index); }

    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1).
    double next_double() {
        return (next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via std::normal_distribution (per-build deterministic).
    double next_gaussian() { return normal_(engine_); }

    /// Uniform integer in [0, bound).
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("RngStream: bound must be positive");
        // rejection sampling to avoid modulo bias
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

    /// Index sampled from non-negative weights (need not be normalized).
    std::size_t sample_discrete(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (total <= 0.0) throw std::domain_error("RngStream: degenerate weight vector");
        double x = next_double() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (x < acc) return i;
        }
        return weights.size() - 1;
    }

  private:
    RngStream(std::uint64_t parent_key, std::uint64_t index)
        : key_(mix(parent_key ^ mix(index + kChildSalt))) {
        engine_.seed(key_);
    }

    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    static constexpr std::uint64_t kRootSalt = 0x5bd1e995u;
    static constexpr std::uint64_t kChildSalt = 0x2545f4914f6cdd1dULL;

    std::uint64_t key_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace specbox
