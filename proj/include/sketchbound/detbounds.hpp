#pragma once

#include "sketchbound/matcore.hpp"

namespace sketchbound {

/// x / sqrt(1 + x^2): maps tangents to sines.
double phi(double x);

/// Tangent and sine operators of a sketch Z relative to U_k.
struct AngleOperators {
  DenseMatrix Omega_k;      // U_k^T (Z - Zhat), k x p
  DenseMatrix Omega_bar_k;  // Ubar_k^T (Z - Zhat), (n-k) x p
  DenseMatrix T_k;          // Omega_bar_k Omega_k^+, (n-k) x k
  DenseMatrix S_k;          // (I + T_k T_k^T)^{-1/2} T_k
  Vector sigma_T;           // descending
  Vector sigma_S;           // descending, phi(sigma_T)
};

/// Throws PreconditionError when Omega_k is not numerically full row rank,
/// reporting its smallest singular value.
AngleOperators angle_operators(const SvdFactors& svd, const DenseMatrix& Z, const DenseMatrix& Zhat,
                               Index k, const Tolerances& tol = kDefaultTolerances);
AngleOperators angle_operators(const SvdFactors& svd, const DenseMatrix& Z, Index k,
                               const Tolerances& tol = kDefaultTolerances);

/// U_k^T (I - pi(Z)) U_k, the smallest matrix in the Lemma 1 chain.
DenseMatrix projected_head_residual(const SvdFactors& svd, const DenseMatrix& Z, Index k);

/// ||(I - pi(Z)) A||^2 - ||(I - pi(Z)) Abar_k||^2 in the given norm.
double general_metric(const DenseMatrix& A, const SvdFactors& svd, const DenseMatrix& Z, Index k,
                      Norm norm);

struct DeterministicBoundReport {
  Norm norm = Norm::Frobenius;
  Index k = 0;
  double lhs_general_metric = 0.0;
  double bound_sine = 0.0;
  double bound_tangent = 0.0;
  double bound = 0.0;
};

/// min{ ||S_k||^2 ||Sigma_k||_2^2, ||T_k Sigma_k||^2 } with Zhat = 0.
DeterministicBoundReport theorem1_bound(const DenseMatrix& A, const SvdFactors& svd,
                                        const DenseMatrix& Z, Index k, Norm norm);
DeterministicBoundReport theorem1_bound(const SvdFactors& svd, const DenseMatrix& Z, Index k,
                                        Norm norm);

/// Spectral bound on ||(I - pi(Z)) A||_2^2 - sigma_{k+1}^2 with the deflated
/// head (Sigma_k^2 - sigma_{k+1}^2 I)^{1/2}.
DeterministicBoundReport theorem2_bound(const DenseMatrix& A, const SvdFactors& svd,
                                        const DenseMatrix& Z, Index k);
DeterministicBoundReport theorem2_bound(const SvdFactors& svd, const DenseMatrix& Z, Index k);

/// (Sigma_k^2 - sigma_{k+1}^2 I)^{1/2} as a vector; sigma_{k+1} = 0 when
/// k = min(n, m).
Vector deflated_head(const SvdFactors& svd, Index k);

}  // namespace sketchbound
