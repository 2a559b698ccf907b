#include "sketchbound/detbounds.hpp"

#include "sketchbound/errors.hpp"

#include <cmath>
#include <sstream>

namespace sketchbound {

double phi(double x) {
  if (!(x >= 0.0)) throw PreconditionError("phi: argument must be >= 0");
  if (std::isinf(x)) return 1.0;
  return x / std::sqrt(1.0 + x * x);
}

namespace {

void check_k(const SvdFactors& svd, const DenseMatrix& Z, Index k) {
  if (Z.rows() != svd.rows()) {
    std::ostringstream msg;
    msg << "sketch has " << Z.rows() << " rows, matrix has " << svd.rows();
    throw PreconditionError(msg.str());
  }
  if (k < 1 || k > Z.cols() || k > svd.size()) {
    std::ostringstream msg;
    msg << "k = " << k << " must satisfy 1 <= k <= p = " << Z.cols();
    throw PreconditionError(msg.str());
  }
}

double squared(Norm norm, const Vector& singular) {
  if (singular.size() == 0) return 0.0;
  return norm == Norm::Spectral ? singular(0) * singular(0) : singular.squaredNorm();
}

}  // namespace

AngleOperators angle_operators(const SvdFactors& svd, const DenseMatrix& Z, const DenseMatrix& Zhat,
                               Index k, const Tolerances& tol) {
  check_k(svd, Z, k);
  if (Zhat.size() != 0 && (Zhat.rows() != Z.rows() || Zhat.cols() != Z.cols()))
    throw PreconditionError("angle_operators: mean and sketch differ in shape");
  const DenseMatrix centered = Zhat.size() == 0 ? Z : DenseMatrix(Z - Zhat);

  AngleOperators out;
  out.Omega_k = svd.Uk(k).transpose() * centered;
  out.Omega_bar_k = svd.Ubar_k(k).transpose() * centered;

  const Vector s = singular_values(out.Omega_k);
  const double smin = s(s.size() - 1);
  if (!(smin > tol.rank_tol * s(0))) {
    std::ostringstream msg;
    msg << "Omega_k is not full row rank: sigma_min = " << smin << ", sigma_max = " << s(0);
    throw PreconditionError(msg.str());
  }
  out.T_k = out.Omega_bar_k * pseudo_inverse(out.Omega_k);

  // (I + T T^T)^{-1/2} T = T (I + T^T T)^{-1/2}; the right-hand form is k x k.
  const DenseMatrix gram = DenseMatrix::Identity(k, k) + out.T_k.transpose() * out.T_k;
  const SymmetricEigen eig = symmetric_eigen(gram, true);
  const Vector inv_root = eig.values.cwiseMax(1.0).cwiseSqrt().cwiseInverse();
  out.S_k = out.T_k * (eig.vectors * inv_root.asDiagonal() * eig.vectors.transpose());

  out.sigma_T = singular_values(out.T_k);
  out.sigma_S = out.sigma_T.unaryExpr([](double x) { return phi(x); });
  return out;
}

AngleOperators angle_operators(const SvdFactors& svd, const DenseMatrix& Z, Index k,
                               const Tolerances& tol) {
  return angle_operators(svd, Z, DenseMatrix(), k, tol);
}

DenseMatrix projected_head_residual(const SvdFactors& svd, const DenseMatrix& Z, Index k) {
  const DenseMatrix Q = orthonormal_basis(Z);
  const DenseMatrix Uk = svd.Uk(k);
  const DenseMatrix QtU = Q.transpose() * Uk;
  DenseMatrix out = DenseMatrix::Identity(k, k) - QtU.transpose() * QtU;
  return 0.5 * (out + out.transpose());
}

double general_metric(const DenseMatrix& A, const SvdFactors& svd, const DenseMatrix& Z, Index k,
                      Norm norm) {
  const DenseMatrix Q = orthonormal_basis(Z);
  const DenseMatrix Abar = A - svd.Uk(k) * svd.Sigma_k(k) * svd.Vk(k).transpose();
  const DenseMatrix R = A - project_onto(Q, A);
  const DenseMatrix Rbar = Abar - project_onto(Q, Abar);
  const double full = sketchbound::norm(R, norm);
  const double deflated = sketchbound::norm(Rbar, norm);
  return full * full - deflated * deflated;
}

Vector deflated_head(const SvdFactors& svd, Index k) {
  const double next = svd.sigma_after(k);
  Vector out(k);
  for (Index i = 0; i < k; ++i) out(i) = std::sqrt(std::max(svd.sigma(i) * svd.sigma(i) - next * next, 0.0));
  return out;
}

DeterministicBoundReport theorem1_bound(const DenseMatrix& A, const SvdFactors& svd,
                                        const DenseMatrix& Z, Index k, Norm norm) {
  const AngleOperators ops = angle_operators(svd, Z, k);
  DeterministicBoundReport rep;
  rep.norm = norm;
  rep.k = k;
  const double s1 = svd.sigma(0);
  rep.bound_sine = squared(norm, ops.sigma_S) * s1 * s1;
  rep.bound_tangent = squared(norm, singular_values(ops.T_k * svd.sigma.head(k).asDiagonal()));
  rep.bound = std::min(rep.bound_sine, rep.bound_tangent);
  rep.lhs_general_metric = general_metric(A, svd, Z, k, norm);
  return rep;
}

DeterministicBoundReport theorem1_bound(const SvdFactors& svd, const DenseMatrix& Z, Index k,
                                        Norm norm) {
  return theorem1_bound(svd.reconstruct(), svd, Z, k, norm);
}

DeterministicBoundReport theorem2_bound(const DenseMatrix& A, const SvdFactors& svd,
                                        const DenseMatrix& Z, Index k) {
  const AngleOperators ops = angle_operators(svd, Z, k);
  const Vector hat = deflated_head(svd, k);
  DeterministicBoundReport rep;
  rep.norm = Norm::Spectral;
  rep.k = k;
  rep.bound_sine = squared(Norm::Spectral, ops.sigma_S) * hat(0) * hat(0);
  rep.bound_tangent = squared(Norm::Spectral, singular_values(ops.T_k * hat.asDiagonal()));
  rep.bound = std::min(rep.bound_sine, rep.bound_tangent);

  const DenseMatrix Q = orthonormal_basis(Z);
  const double full = spectral_norm(A - project_onto(Q, A));
  const double next = svd.sigma_after(k);
  rep.lhs_general_metric = full * full - next * next;
  return rep;
}

DeterministicBoundReport theorem2_bound(const SvdFactors& svd, const DenseMatrix& Z, Index k) {
  return theorem2_bound(svd.reconstruct(), svd, Z, k);
}

}  // namespace sketchbound
