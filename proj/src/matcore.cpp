#include "sketchbound/matcore.hpp"

#include "sketchbound/errors.hpp"
#include "sketchbound/random.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace sketchbound {

std::string_view to_string(Norm norm) {
  return norm == Norm::Spectral ? "spectral" : "frobenius";
}

Norm parse_norm(std::string_view text) {
  if (text == "spectral" || text == "2") return Norm::Spectral;
  if (text == "frobenius" || text == "F" || text == "fro") return Norm::Frobenius;
  throw PreconditionError("unknown norm '" + std::string(text) + "' (expected spectral|frobenius)");
}

DenseMatrix SvdFactors::SigmaBar_k(Index k) const {
  DenseMatrix out = DenseMatrix::Zero(rows() - k, cols() - k);
  for (Index i = k; i < sigma.size(); ++i) out(i - k, i - k) = sigma(i);
  return out;
}

DenseMatrix SvdFactors::full_u() const {
  if (U.cols() == U.rows()) return U;
  return orthonormal_complete(U);
}

DenseMatrix SvdFactors::Ubar_k(Index k) const {
  const Index n = rows();
  if (U.cols() == n) return U.rightCols(n - k);
  return full_u().rightCols(n - k);
}

DenseMatrix SvdFactors::Vbar_k(Index k) const {
  const Index m = cols();
  if (V.cols() == m) return V.rightCols(m - k);
  return orthonormal_complete(V).rightCols(m - k);
}

Index SvdFactors::numerical_rank(double tol) const {
  if (sigma.size() == 0 || sigma(0) <= 0.0) return 0;
  const double cut = tol * sigma(0);
  Index r = 0;
  while (r < sigma.size() && sigma(r) > cut) ++r;
  return r;
}

namespace {

void require_finite(const DenseMatrix& M, const char* what) {
  if (!M.allFinite()) throw PreconditionError(std::string(what) + ": matrix has non-finite entries");
}

}  // namespace

SvdFactors svd(const DenseMatrix& A) {
  require_finite(A, "svd");
  Eigen::BDCSVD<DenseMatrix> solver(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "svd: bidiagonal divide-and-conquer did not converge on a " << A.rows() << "x" << A.cols()
        << " input";
    throw NumericalError(msg.str());
  }
  // BDCSVD already returns sigma in descending order.
  return SvdFactors{solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

Vector singular_values(const DenseMatrix& M) {
  require_finite(M, "singular_values");
  if (M.size() == 0) return Vector();
  Eigen::BDCSVD<DenseMatrix> solver(M);
  if (solver.info() != Eigen::Success) throw NumericalError("singular_values: SVD did not converge");
  return solver.singularValues();
}

DenseMatrix orthonormal_basis(const DenseMatrix& Z, double rank_tol) {
  require_finite(Z, "orthonormal_basis");
  const Index n = Z.rows();
  const Index p = Z.cols();
  if (p > n) throw PreconditionError("orthonormal_basis: more columns than rows");
  Eigen::HouseholderQR<DenseMatrix> qr(Z);
  const DenseMatrix R = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  const Vector sv = Eigen::JacobiSVD<DenseMatrix>(R).singularValues();
  const double cut = rank_tol * sv(0);
  const Index defective = (sv.array() <= cut).count();
  if (sv(0) == 0.0 || defective > 0) {
    std::ostringstream msg;
    msg << "orthonormal_basis: " << (sv(0) == 0.0 ? p : defective) << " of " << p
        << " columns are numerically dependent (sigma_min/sigma_max = "
        << (sv(0) == 0.0 ? 0.0 : sv(p - 1) / sv(0)) << ", rank_tol = " << rank_tol << ")";
    throw PreconditionError(msg.str());
  }
  return qr.householderQ() * DenseMatrix::Identity(n, p);
}

DenseMatrix orthonormal_complete(const DenseMatrix& Q) {
  const Index n = Q.rows();
  const Index r = Q.cols();
  if (r >= n) return Q;
  Eigen::HouseholderQR<DenseMatrix> qr(Q);
  DenseMatrix full = qr.householderQ();
  DenseMatrix out(n, n);
  out.leftCols(r) = Q;
  out.rightCols(n - r) = full.rightCols(n - r);
  return out;
}

DenseMatrix pseudo_inverse(const DenseMatrix& M, double pinv_tol) {
  require_finite(M, "pseudo_inverse");
  Eigen::BDCSVD<DenseMatrix> solver(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (solver.info() != Eigen::Success) throw NumericalError("pseudo_inverse: SVD did not converge");
  const Vector& s = solver.singularValues();
  Vector inv = Vector::Zero(s.size());
  if (s.size() > 0 && s(0) > 0.0) {
    const double cut = pinv_tol * s(0);
    for (Index i = 0; i < s.size(); ++i)
      if (s(i) > cut) inv(i) = 1.0 / s(i);
  }
  return solver.matrixV() * inv.asDiagonal() * solver.matrixU().transpose();
}

SymmetricEigen symmetric_eigen(const DenseMatrix& M, bool with_vectors) {
  if (M.rows() != M.cols()) throw PreconditionError("symmetric_eigen: matrix is not square");
  require_finite(M, "symmetric_eigen");
  const double scale = M.cwiseAbs().maxCoeff();
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1e-300) && asym > 0.0) {
    std::ostringstream msg;
    msg << "symmetric_eigen: matrix is not symmetric (max |M - M^T| = " << asym << ")";
    throw PreconditionError(msg.str());
  }
  const DenseMatrix sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(
      sym, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "symmetric_eigen: tridiagonal QR did not converge within "
        << Eigen::SelfAdjointEigenSolver<DenseMatrix>::m_maxIterations * M.rows() << " iterations";
    throw NumericalError(msg.str());
  }
  SymmetricEigen out;
  out.values = es.eigenvalues();
  if (with_vectors) out.vectors = es.eigenvectors();
  return out;
}

double max_eigenvalue(const DenseMatrix& M) {
  if (M.size() == 0) return 0.0;
  return symmetric_eigen(M, false).values.maxCoeff();
}

DenseMatrix psd_sqrt(const DenseMatrix& C, double psd_tol) {
  if (C.size() == 0) return C;
  SymmetricEigen eig = symmetric_eigen(C, true);
  const double scale = std::max(std::abs(eig.values.minCoeff()), std::abs(eig.values.maxCoeff()));
  const double floor = -psd_tol * scale;
  Vector root(eig.values.size());
  for (Index i = 0; i < root.size(); ++i) {
    const double lambda = eig.values(i);
    if (lambda < floor) {
      std::ostringstream msg;
      msg << "psd_sqrt: matrix is not positive semidefinite (eigenvalue " << lambda
          << " below -" << psd_tol << " * ||C||_2)";
      throw PreconditionError(msg.str());
    }
    root(i) = lambda > 0.0 ? std::sqrt(lambda) : 0.0;
  }
  DenseMatrix S = eig.vectors * root.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (S + S.transpose());
}

double spectral_norm(const DenseMatrix& M) {
  if (M.size() == 0) return 0.0;
  if (M.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  return singular_values(M)(0);
}

double frobenius_norm(const DenseMatrix& M) { return M.norm(); }

double norm(const DenseMatrix& M, Norm which) {
  return which == Norm::Spectral ? spectral_norm(M) : frobenius_norm(M);
}

PsdOrderingReport psd_order(const DenseMatrix& M, const DenseMatrix& N, double tol) {
  if (M.rows() != N.rows() || M.cols() != N.cols()) {
    std::ostringstream msg;
    msg << "psd_order: dimension mismatch " << M.rows() << "x" << M.cols() << " vs " << N.rows()
        << "x" << N.cols();
    throw PreconditionError(msg.str());
  }
  PsdOrderingReport report;
  report.tolerance = tol;
  report.min_eigenvalue_of_difference = symmetric_eigen(N - M, false).values.minCoeff();
  report.satisfied = report.min_eigenvalue_of_difference >= -tol;
  return report;
}

namespace {

void require_orthonormal(const DenseMatrix& Q, const char* name) {
  const DenseMatrix gram = Q.transpose() * Q;
  const double err = (gram - DenseMatrix::Identity(Q.cols(), Q.cols())).cwiseAbs().maxCoeff();
  if (err > 1e-10) {
    std::ostringstream msg;
    msg << "canonical_angle_sines: " << name << " is not orthonormal (max |Q^T Q - I| = " << err << ")";
    throw PreconditionError(msg.str());
  }
}

}  // namespace

Vector canonical_angle_sines(const DenseMatrix& Q1, const DenseMatrix& Q2) {
  if (Q1.rows() != Q2.rows()) throw PreconditionError("canonical_angle_sines: row counts differ");
  require_orthonormal(Q1, "Q1");
  require_orthonormal(Q2, "Q2");
  // Sines are the singular values of the smaller basis' residual against the
  // larger span.
  const DenseMatrix& small = Q1.cols() <= Q2.cols() ? Q1 : Q2;
  const DenseMatrix& large = Q1.cols() <= Q2.cols() ? Q2 : Q1;
  const DenseMatrix residual = small - large * (large.transpose() * small);
  Vector s = Eigen::JacobiSVD<DenseMatrix>(residual).singularValues();
  for (Index i = 0; i < s.size(); ++i) s(i) = std::clamp(s(i), 0.0, 1.0);
  return s;
}

double lanczos_max_eigenvalue(const std::function<void(const Vector&, Vector&)>& op, Index n,
                              double rel_tol) {
  if (n <= 0) return 0.0;
  NormalGenerator gen(SeededStream{0x5eed1a2c20a5ULL, 0});
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = gen.next();
  v.normalize();

  const Index cap = n;
  DenseMatrix basis(n, std::min<Index>(cap, 64));
  std::vector<double> alpha;
  std::vector<double> beta;
  Vector w(n);
  double theta = 0.0;

  auto ritz = [&](Index m, double& residual) {
    Vector diag(m), sub(std::max<Index>(m - 1, 1));
    for (Index i = 0; i < m; ++i) diag(i) = alpha[i];
    for (Index i = 0; i + 1 < m; ++i) sub(i) = beta[i];
    if (m == 1) {
      residual = std::abs(beta[0]);
      return alpha[0];
    }
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es;
    es.computeFromTridiagonal(diag, sub.head(m - 1), Eigen::ComputeEigenvectors);
    const Index top = m - 1;
    residual = std::abs(beta[m - 1] * es.eigenvectors()(m - 1, top));
    return es.eigenvalues()(top);
  };

  for (Index j = 0; j < cap; ++j) {
    if (j >= basis.cols()) basis.conservativeResize(Eigen::NoChange, std::min<Index>(cap, 2 * basis.cols()));
    basis.col(j) = v;
    op(v, w);
    const double a = v.dot(w);
    alpha.push_back(a);
    w -= a * v;
    if (j > 0) w -= beta[j - 1] * basis.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) {
      const Vector coeff = basis.leftCols(j + 1).transpose() * w;
      w -= basis.leftCols(j + 1) * coeff;
    }
    const double b = w.norm();
    beta.push_back(b);

    const Index m = j + 1;
    double scale = 0.0;
    for (Index i = 0; i < m; ++i) scale = std::max(scale, std::abs(alpha[i]) + std::abs(beta[i]));
    const bool breakdown = b <= 1e-13 * std::max(scale, 1e-300);
    if (breakdown || m == cap || (m >= 8 && m % 4 == 0)) {
      double residual = 0.0;
      theta = ritz(m, residual);
      // A random start touches every eigenspace, so an invariant Krylov
      // subspace already holds the top eigenvalue.
      if (breakdown || m == cap) return std::max(theta, 0.0);
      if (residual <= rel_tol * std::max(std::abs(theta), 1e-300)) return std::max(theta, 0.0);
    }
    v = w / b;
  }
  return std::max(theta, 0.0);
}

}  // namespace sketchbound
