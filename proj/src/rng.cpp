#include "oscsde/rng.hpp"

#include "oscsde/core.hpp"

#include <cmath>
#include <numbers>

namespace oscsde {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) noexcept {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}

inline Philox4x32::Counter round(const Philox4x32::Counter& c, const Philox4x32::Key& k) noexcept {
  std::uint32_t lo0, hi0, lo1, hi1;
  mulhilo(kMulA, c[0], lo0, hi0);
  mulhilo(kMulB, c[2], lo1, hi1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter counter, Key key) noexcept {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kWeylA;
      key[1] += kWeylB;
    }
    counter = round(counter, key);
  }
  return counter;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(master ^ splitmix64(index + 0x9E3779B97F4A7C15ull));
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t path_index) noexcept
    : seed_(seed), path_index_(path_index) {}

void RngStream::refill() noexcept {
  const Philox4x32::Counter counter{
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(path_index_), static_cast<std::uint32_t>(path_index_ >> 32)};
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed_),
                            static_cast<std::uint32_t>(seed_ >> 32)};
  const auto out = Philox4x32::generate(counter, key);
  words_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  words_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  word_pos_ = 0;
  ++block_;
}

double RngStream::next_uniform() noexcept {
  if (word_pos_ >= 2) refill();
  const std::uint64_t bits = words_[word_pos_++] >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngStream::next_gaussian() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

void RngStream::fill_gaussian(std::span<double> out) noexcept {
  for (double& v : out) v = next_gaussian();
}

std::vector<double> gaussian_increments(RngStream& stream, std::size_t count) {
  if (count == 0) throw InvalidInput("gaussian_increments: count must be positive");
  std::vector<double> out(count);
  stream.fill_gaussian(out);
  return out;
}

}  // namespace oscsde
