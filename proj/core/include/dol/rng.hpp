#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace dol {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Every block of four 32-bit outputs is a pure function of (key, counter),
/// which lets the estimators address any random draw by its indices instead
/// of advancing a shared sequential state.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// SplitMix64 finaliser; used to fold identifiers into Philox keys.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Hashes a seed and a stream identifier into a 64-bit key.
std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) noexcept;

/// A sequential view over one counter-addressed Philox stream.
///
/// The stream is identified by (key, c1, c2, c3); draws advance c0. Two
/// streams with different identifiers are statistically independent.
class CounterStream {
 public:
  CounterStream(std::uint64_t key, std::uint32_t c1, std::uint32_t c2, std::uint32_t c3) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer on [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;
  /// Standard normal via the Box-Muller transform (pairs are cached).
  double normal() noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  std::size_t used_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dol
