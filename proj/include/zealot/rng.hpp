#pragma once

#include <cmath>
#include <cstdint>

namespace zealot {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// Stafford mix13 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

// Derives an independent stream key. Injective in `index` for a fixed base,
// so distinct indices can never collide under the same base.
constexpr std::uint64_t derive_stream(std::uint64_t base, std::uint64_t index) noexcept {
  return mix64(base + (index + 1) * kGolden);
}

// Counter-based generator: output n is a pure function of (key, n), so any
// stream can be regenerated exactly and streams with distinct keys are
// independent. No state beyond the counter.
class Rng {
 public:
  explicit constexpr Rng(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t next() noexcept { return mix64(key_ + (++ctr_) * kGolden); }

  // uniform in [0, 1)
  double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // exponential with the given rate; rate must be > 0
  double exponential(double rate) noexcept { return -std::log1p(-uniform01()) / rate; }

  // uniform in [0, n); multiply-shift (bias < 2^-32, immaterial here)
  std::uint32_t below(std::uint32_t n) noexcept {
    return static_cast<std::uint32_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return ctr_; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace zealot
