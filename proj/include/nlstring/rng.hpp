#pragma once

#include <array>
#include <cstdint>

namespace nlstring {

/// Philox4x32-10 counter-based block function (Salmon et al., Random123).
/// Output is a pure function of (counter, key), so streams are reproducible
/// across platforms and independent of evaluation order.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

inline constexpr const char* kRngName = "philox4x32-10";
inline constexpr int kRngVersion = 1;

/// Sequential view over a Philox stream identified by (seed, stream).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

/// Seed for item `index` of a master stream; independent of scheduling.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

}  // namespace nlstring
