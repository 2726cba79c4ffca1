#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace strata {

/// Finalizer of the splitmix64 generator: a 64-bit bijective mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for the RNG stream of replication `r` at sample size `n`. Built by a
/// splitmix64-style hash chain so nearby (seed, r, n) triples land on
/// unrelated streams; no jump-ahead facility needed.
std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t replication,
                                 std::uint64_t n) noexcept;

/// xoshiro256++ with explicit scalar seeding (expanded through splitmix64).
/// Each consumer owns its instance; nothing here is thread-safe by design.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1).
  double uniform01() noexcept;

  /// Uniform on (0, 1); safe to pass to log().
  double uniform_open01() noexcept;

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept;

  /// Standard normal via Box-Muller; the second variate of each pair is
  /// cached, so draws come in a fixed deterministic order.
  double normal() noexcept;

  /// Exponential with the given rate (mean 1/rate).
  double exponential(double rate) noexcept;

  /// Index in [0, probs.size()) with the given probabilities. The caller is
  /// responsible for probs summing to 1.
  std::size_t categorical(std::span<const double> probs) noexcept;

 private:
  std::array<std::uint64_t, 4> state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace strata
