#include "sketchbound/random.hpp"

#include <cmath>
#include <numbers>

namespace sketchbound {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) {
  return splitmix64(splitmix64(seed) ^ (purpose * 0xD1B54A32D192ED03ULL));
}

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::array<std::uint32_t, 4> NormalGenerator::draw_block() {
  const std::array<std::uint32_t, 4> counter{
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_.stream_index),
      static_cast<std::uint32_t>(stream_.stream_index >> 32)};
  const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(stream_.master_seed),
                                         static_cast<std::uint32_t>(stream_.master_seed >> 32)};
  ++block_;
  return philox4x32_10(counter, key);
}

double NormalGenerator::next() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const auto w = draw_block();
  const std::uint64_t a = (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(w[2]) << 32) | w[3];
  const double u1 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(angle);
  has_cached_ = true;
  return r * std::cos(angle);
}

double NormalGenerator::next_uniform() {
  const auto w = draw_block();
  const std::uint64_t a = (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
  return static_cast<double>(a >> 11) * 0x1.0p-53;
}

}  // namespace sketchbound
