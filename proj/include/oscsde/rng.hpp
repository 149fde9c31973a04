#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace oscsde {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// A pure function of (counter, key); no hidden state.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key) noexcept;
};

/// splitmix64 finalizer. Used to derive stream keys.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Key of the stream family for sweep index `index` under `master`:
/// splitmix64(master ^ splitmix64(index + 0x9E3779B97F4A7C15)).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Gaussian stream for one Monte Carlo path.
///
/// Draw k of stream (seed, path_index) depends only on (seed, path_index, k):
/// the Philox key is the seed, the counter is (block, path_index), so streams
/// can be consumed in any order or on any thread with the same result.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t path_index) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t path_index() const noexcept { return path_index_; }

  /// Uniform in the open interval (0, 1) with 53 random bits.
  double next_uniform() noexcept;
  /// Standard normal via Box-Muller on consecutive uniform pairs.
  double next_gaussian() noexcept;
  void fill_gaussian(std::span<double> out) noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t path_index_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> words_{};
  int word_pos_ = 2;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// `count` independent standard normal samples drawn from `stream`.
std::vector<double> gaussian_increments(RngStream& stream, std::size_t count);

}  // namespace oscsde
