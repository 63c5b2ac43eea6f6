#pragma once

#include <cstdint>
#include <span>

#include "affectfuse/errors.hpp"

namespace affectfuse {

/// SplitMix64 — the deterministic random source for all simulation.
///
/// The recurrence, reproducible in any language with 64-bit unsigned
/// wrapping arithmetic:
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// Derived draws are defined exactly as:
///   next_double  = (next_u64() >> 11) * 2^-53            (in [0, 1))
///   next_index n = next_u64() % n
///   bernoulli p  = next_double() < p
///   categorical  = first index whose cumulative mass exceeds next_double()
class SplitMix64 {
  public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next_u64() noexcept {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    std::size_t next_index(std::size_t n) {
        if (n == 0) throw Error("next_index requires n >= 1");
        return static_cast<std::size_t>(next_u64() % n);
    }

    bool bernoulli(double p) noexcept { return next_double() < p; }

    /// Draws from a discrete distribution given by non-negative masses.
    /// Walks the masses in order and picks the first index whose running
    /// total exceeds u; rounding leftovers fall to the last index.
    std::size_t next_categorical(std::span<const double> masses) {
        if (masses.empty()) throw Error("next_categorical requires a non-empty distribution");
        const double u = next_double();
        double cumulative = 0.0;
        for (std::size_t i = 0; i < masses.size(); ++i) {
            cumulative += masses[i];
            if (u < cumulative) return i;
        }
        return masses.size() - 1;
    }

  private:
    std::uint64_t state_;
};

/// Deterministic per-entity substream: generator number `index` derived
/// from `seed` is SplitMix64(SplitMix64(seed).next_u64() + index + 1).
/// The outer mix decorrelates nearby session seeds, the inner offset
/// decorrelates nearby entities.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) noexcept {
    return SplitMix64(SplitMix64(seed).next_u64() + index + 1);
}

}  // namespace affectfuse
