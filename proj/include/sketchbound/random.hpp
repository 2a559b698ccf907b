#pragma once

#include <array>
#include <cstdint>

namespace sketchbound {

/// Identifies one reproducible random stream. Identical (master_seed,
/// stream_index) pairs give bit-identical sequences; different stream indices
/// address disjoint Philox counter ranges.
struct SeededStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
};

/// Derives a master seed for a named purpose (matrix generation, trials, ...)
/// from a user seed, so purposes never share streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose);

/// Philox4x32-10 block function (Salmon et al. 2011): 128-bit counter, 64-bit key.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Standard normal variates from a SeededStream.
///
/// Block b of the stream is philox4x32_10({b_lo, b_hi, s_lo, s_hi}, {seed_lo,
/// seed_hi}) with s = stream_index. Each block yields two 53-bit uniforms
/// u1 = (w0:w1 >> 11 + 1) 2^-53 in (0, 1] and u2 = (w2:w3 >> 11) 2^-53 in
/// [0, 1), mapped by Box-Muller to r cos(2 pi u2), r sin(2 pi u2) with
/// r = sqrt(-2 log u1), emitted in that order.
class NormalGenerator {
public:
  explicit NormalGenerator(SeededStream stream) : stream_(stream) {}

  double next();
  /// Uniform in [0, 1) from the same counter sequence (consumes a block).
  double next_uniform();

  std::uint64_t blocks_consumed() const { return block_; }

private:
  std::array<std::uint32_t, 4> draw_block();

  SeededStream stream_;
  std::uint64_t block_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace sketchbound
