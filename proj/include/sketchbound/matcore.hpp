#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string_view>

namespace sketchbound {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class Norm { Spectral, Frobenius };

std::string_view to_string(Norm norm);
Norm parse_norm(std::string_view text);

/// Numerical thresholds shared by the kernels. All are relative to the
/// largest singular value / eigenvalue of the matrix at hand.
struct Tolerances {
  double rank_tol = 1e-10;      // full-rank checks (orthonormal_basis, Omega_k)
  double pinv_tol = 1e-12;      // pseudo-inverse truncation, numerical rank of A
  double psd_tol = 1e-10;       // negative eigenvalues above -psd_tol * ||C||_2 are clipped
  double eig_rank_tol = 1e-12;  // rank of a covariance matrix
};

inline constexpr Tolerances kDefaultTolerances{};

/// Thin SVD A = U diag(sigma) V^T with sigma sorted descending.
///
/// For n >= m, U is n x m (thin) and V is m x m; for n < m, U is n x n and V is
/// m x n. The rank-k partition A = [U_k Ubar_k] diag(Sigma_k, SigmaBar_k)
/// [V_k Vbar_k]^T is exposed through the accessors. Ubar_k needs an orthonormal
/// complement when U is thin; it is built on demand by full_u().
struct SvdFactors {
  DenseMatrix U;
  Vector sigma;
  DenseMatrix V;

  Index rows() const { return U.rows(); }
  Index cols() const { return V.rows(); }
  Index size() const { return sigma.size(); }

  DenseMatrix Uk(Index k) const { return U.leftCols(k); }
  DenseMatrix Vk(Index k) const { return V.leftCols(k); }
  DenseMatrix Sigma_k(Index k) const { return sigma.head(k).asDiagonal(); }
  /// (n-k) x (m-k) rectangular diagonal tail block.
  DenseMatrix SigmaBar_k(Index k) const;
  /// n x (n-k) orthonormal complement of U_k.
  DenseMatrix Ubar_k(Index k) const;
  /// m x (m-k) orthonormal complement of V_k.
  DenseMatrix Vbar_k(Index k) const;

  /// sigma_{k+1} (1-based), or 0 when k >= min(n, m).
  double sigma_after(Index k) const { return k < sigma.size() ? sigma(k) : 0.0; }

  /// Square n x n orthogonal U whose leading columns are the computed ones.
  DenseMatrix full_u() const;
  DenseMatrix reconstruct() const { return U * sigma.asDiagonal() * V.transpose(); }
  /// Count of singular values above tol * sigma_1.
  Index numerical_rank(double tol = kDefaultTolerances.pinv_tol) const;
};

struct PsdOrderingReport {
  double min_eigenvalue_of_difference = 0.0;
  bool satisfied = false;
  double tolerance = 0.0;
};

struct SymmetricEigen {
  Vector values;      // ascending
  DenseMatrix vectors;
};

SvdFactors svd(const DenseMatrix& A);

/// Singular values only, descending.
Vector singular_values(const DenseMatrix& M);

/// Orthonormal Q with range(Q) = range(Z). Throws PreconditionError when
/// sigma_min(Z) <= rank_tol * sigma_max(Z).
DenseMatrix orthonormal_basis(const DenseMatrix& Z, double rank_tol = kDefaultTolerances.rank_tol);

/// Applies the orthogonal projector onto range(Q) for orthonormal Q.
inline DenseMatrix project_onto(const DenseMatrix& Q, const DenseMatrix& X) {
  return Q * (Q.transpose() * X);
}

/// Completes orthonormal columns Q (n x r) to an n x n orthogonal matrix.
DenseMatrix orthonormal_complete(const DenseMatrix& Q);

DenseMatrix pseudo_inverse(const DenseMatrix& M, double pinv_tol = kDefaultTolerances.pinv_tol);

/// Eigendecomposition of (M + M^T)/2. Throws PreconditionError when M is not
/// square or not symmetric to 1e-12 relative to max |M_ij|.
SymmetricEigen symmetric_eigen(const DenseMatrix& M, bool with_vectors = true);

/// Largest eigenvalue of (M + M^T)/2.
double max_eigenvalue(const DenseMatrix& M);

/// Symmetric PSD square root. Eigenvalues in [-psd_tol * ||C||_2, 0) are
/// clipped to zero; anything more negative is rejected.
DenseMatrix psd_sqrt(const DenseMatrix& C, double psd_tol = kDefaultTolerances.psd_tol);

double spectral_norm(const DenseMatrix& M);
double frobenius_norm(const DenseMatrix& M);
double norm(const DenseMatrix& M, Norm which);

/// Checks M <= N in the Loewner order: the smallest eigenvalue of N - M must
/// be >= -tol.
PsdOrderingReport psd_order(const DenseMatrix& M, const DenseMatrix& N, double tol);

/// Sines of the canonical angles between range(Q1) and range(Q2), descending.
/// There are min(cols(Q1), cols(Q2)) of them.
Vector canonical_angle_sines(const DenseMatrix& Q1, const DenseMatrix& Q2);

/// Largest eigenvalue of a symmetric positive semidefinite operator of order
/// n given only through y = op(x). Lanczos with full reorthogonalization,
/// stopped once the Ritz residual falls below rel_tol * theta; dense
/// fallback is the caller's job.
double lanczos_max_eigenvalue(const std::function<void(const Vector&, Vector&)>& op, Index n,
                              double rel_tol = 1e-12);

}  // namespace sketchbound
