#pragma once

// Reproducible randomness.  Philox4x32-10 is counter-based: the state is a
// (counter, key) pair and the output is a pure function of both, so streams
// never collide, parallel replicates need no jump-ahead, and the same seed
// gives bit-identical output on every platform.  Per-replicate stream keys
// are derived by SplitMix64 hashing of (seed, replicate).

#include <array>
#include <cmath>
#include <cstdint>

namespace lkc {

/// One SplitMix64 step; also the stream-derivation hash.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Key for an independent stream: hash(seed, r) with two mixing rounds so
/// related (seed, r) pairs land far apart.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t replicate) {
    return splitmix64(splitmix64(seed) ^ (0xA0761D6478BD642FULL * (replicate + 1)));
}

class Philox4x32 {
  public:
    using result_type = std::uint32_t;

    explicit Philox4x32(std::uint64_t key64) {
        key_[0] = static_cast<std::uint32_t>(key64);
        key_[1] = static_cast<std::uint32_t>(key64 >> 32);
        ctr_ = {0, 0, 0, 0};
        idx_ = 4; // force generation on first call
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return 0xFFFFFFFFu; }

    result_type operator()() {
        if (idx_ == 4) {
            buf_ = round10(ctr_, key_);
            bump();
            idx_ = 0;
        }
        return buf_[idx_++];
    }

    /// Uniform double in (0, 1), strictly interior so log() is safe.
    double uniform() {
        std::uint64_t hi = (*this)();
        std::uint64_t lo = (*this)();
        std::uint64_t bits = (hi << 32) | lo;
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal pair by Box-Muller (rejection-free, so the draw
    /// count per call is fixed and streams stay aligned).
    std::array<double, 2> gaussian_pair() {
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

  private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> round10(std::array<std::uint32_t, 4> c,
                                                std::array<std::uint32_t, 2> k) {
        for (int r = 0; r < 10; ++r) {
            std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
            std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
            std::array<std::uint32_t, 4> nc;
            nc[0] = static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0];
            nc[1] = static_cast<std::uint32_t>(p1);
            nc[2] = static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1];
            nc[3] = static_cast<std::uint32_t>(p0);
            c = nc;
            k[0] += kW0;
            k[1] += kW1;
        }
        return c;
    }

    void bump() {
        for (int i = 0; i < 4; ++i)
            if (++ctr_[i] != 0) break;
    }

    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> buf_{};
    int idx_;
};

} // namespace lkc
