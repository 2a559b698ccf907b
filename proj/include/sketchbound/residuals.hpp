#pragma once

#include "sketchbound/matcore.hpp"

#include <vector>

namespace sketchbound {

/// Residual norms ||(I - pi(Q)) A|| and ||(I - pi(Q)) Abar_k|| evaluated in the
/// coordinates of the SVD of A. With W = U^T Q (U thin, Q orthonormal) and
/// G = I - W W^T = U^T (I - QQ^T) U,
///
///   ||(I - QQ^T) A||^2 = ||Sigma G Sigma||, squared norms
///
/// so only W and the singular values are touched. Spectral norms come from the
/// largest eigenvalue of Sigma G Sigma: dense below dense_limit, Lanczos above.
///
/// Columns u_j that lie almost inside range(Q) lose their residual to
/// cancellation in 1 - |W_j|^2. For those the rows and columns of G are taken
/// from the explicit residual vectors (I - QQ^T) u_j instead.
class ResidualEngine {
public:
  struct Norms {
    double full = 0.0;      // ||(I - pi) A||
    double deflated = 0.0;  // ||(I - pi) Abar_k||
  };

  struct Coordinates {
    DenseMatrix W;              // U^T Q
    std::vector<Index> exact;   // ascending column indices recomputed explicitly
    DenseMatrix H;              // H(:, a) = U^T (I - QQ^T) u_{exact[a]}
  };

  explicit ResidualEngine(const SvdFactors& svd, Index dense_limit = 200);

  Coordinates coordinates(const DenseMatrix& Q) const;
  /// Same with W = U^T Q already at hand.
  Coordinates coordinates(const DenseMatrix& Q, DenseMatrix W) const;

  Norms measure(const Coordinates& c, Index k, Norm norm) const;
  Norms frobenius(const Coordinates& c, Index k) const;
  Norms spectral(const Coordinates& c, Index k) const;
  double spectral_full(const Coordinates& c) const;
  double spectral_deflated(const Coordinates& c, Index k) const;

  /// ||Abar_k|| in the given norm.
  double tail_norm(Index k, Norm norm) const;

  const DenseMatrix& left_factor() const { return U_; }

private:
  double top_eigenvalue(const Coordinates& c, Index from) const;
  void check(const Coordinates& c) const;

  DenseMatrix U_;
  Vector sigma_;
  Index dense_limit_;
};

}  // namespace sketchbound
