#pragma once

#include <cmath>
#include <cstdint>

namespace sqss {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Deterministic counter-based generator. Each protocol round owns an
/// independent child stream keyed by (master_seed, round_index), so a
/// transcript never depends on which thread, or in which order, rounds run.
class RoundRng {
  public:
    static RoundRng child(std::uint64_t master_seed, std::uint64_t round_index) {
        return RoundRng(mix64(master_seed ^ 0x6A09E667F3BCC909ull) +
                        round_index * 0xD1342543DE82EF95ull);
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix64(state_);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform draw from {0, 1, 2, 3}.
    int next_quarter_turn() { return static_cast<int>(next_u64() >> 62); }

    /// Standard normal via Box-Muller; always consumes exactly two draws.
    double next_gaussian() {
        const double u1 = next_unit();
        const double u2 = next_unit();
        // 1 - u1 > 0, so the log is finite.
        return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

  private:
    explicit RoundRng(std::uint64_t state) : state_(state) {}
    std::uint64_t state_;
};

}  // namespace sqss
