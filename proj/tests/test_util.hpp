#pragma once

#include "sketchbound/matcore.hpp"
#include "sketchbound/random.hpp"
#include "sketchbound/sketch.hpp"

#include <cmath>

namespace testutil {

using sketchbound::DenseMatrix;
using sketchbound::Index;
using sketchbound::Vector;

inline DenseMatrix gaussian(Index n, Index p, std::uint64_t seed, std::uint64_t stream = 0) {
  return sketchbound::standard_gaussian(n, p, sketchbound::SeededStream{seed, stream});
}

inline DenseMatrix random_orthogonal(Index n, std::uint64_t seed) {
  Eigen::HouseholderQR<DenseMatrix> qr(gaussian(n, n, seed, 77));
  return qr.householderQ();
}

/// Q1 diag(sigma) Q2^T with random orthogonal Q1 (n x n), Q2 (m x m).
inline DenseMatrix with_spectrum(Index n, Index m, const Vector& sigma, std::uint64_t seed) {
  const DenseMatrix Q1 = random_orthogonal(n, seed);
  const DenseMatrix Q2 = random_orthogonal(m, seed + 1000);
  DenseMatrix S = DenseMatrix::Zero(n, m);
  for (Index i = 0; i < sigma.size(); ++i) S(i, i) = sigma(i);
  return Q1 * S * Q2.transpose();
}

inline DenseMatrix random_psd(Index n, std::uint64_t seed, Index rank = -1) {
  const DenseMatrix B = gaussian(n, rank < 0 ? n : rank, seed, 5);
  return B * B.transpose();
}

/// Uniform in [lo, hi) from a seeded stream.
inline Vector uniform(Index n, double lo, double hi, std::uint64_t seed) {
  sketchbound::NormalGenerator gen(sketchbound::SeededStream{seed, 9});
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = lo + (hi - lo) * gen.next_uniform();
  return v;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace testutil
