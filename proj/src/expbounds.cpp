#include "sketchbound/expbounds.hpp"

#include "sketchbound/detbounds.hpp"
#include "sketchbound/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace sketchbound {

namespace {

constexpr double kE = std::numbers::e;

double trace_of(const DenseMatrix& M) { return M.trace(); }

double lambda_max_psd(const DenseMatrix& M) {
  if (M.size() == 0) return 0.0;
  return std::max(max_eigenvalue(M), 0.0);
}

void require_p(Index k, Index p, const char* what) {
  if (k < 1 || p < k + 2) {
    std::ostringstream msg;
    msg << what << ": need 1 <= k <= p - 2 (k = " << k << ", p = " << p << ")";
    throw PreconditionError(msg.str());
  }
}

}  // namespace

ProjectedCovariance project_covariance(const DenseMatrix& C, const SvdFactors& svd, Index k,
                                       bool with_sqrt, const Tolerances& tol) {
  const Index n = svd.rows();
  if (C.rows() != n || C.cols() != n) {
    std::ostringstream msg;
    msg << "project_covariance: covariance is " << C.rows() << "x" << C.cols() << ", expected "
        << n << "x" << n;
    throw PreconditionError(msg.str());
  }
  if (k < 1 || k >= n) throw PreconditionError("project_covariance: need 1 <= k < n");

  const DenseMatrix Uk = svd.Uk(k);
  const DenseMatrix Ubar = svd.Ubar_k(k);
  const DenseMatrix CUk = C * Uk;
  ProjectedCovariance pc;
  pc.k = k;
  pc.C_k = Uk.transpose() * CUk;
  pc.C_k = (0.5 * (pc.C_k + pc.C_k.transpose())).eval();
  pc.C_perp_k = Ubar.transpose() * CUk;
  pc.C_bar_k = Ubar.transpose() * C * Ubar;
  pc.C_bar_k = (0.5 * (pc.C_bar_k + pc.C_bar_k.transpose())).eval();

  const Vector s = singular_values(pc.C_k);
  if (!(s(k - 1) > tol.rank_tol * s(0))) {
    std::ostringstream msg;
    msg << "projected covariance C_k is singular: sigma_min = " << s(k - 1)
        << ", sigma_max = " << s(0);
    throw PreconditionError(msg.str());
  }

  Eigen::LLT<DenseMatrix> llt(pc.C_k);
  if (llt.info() != Eigen::Success)
    throw PreconditionError("projected covariance C_k is not positive definite");
  const DenseMatrix X = llt.matrixL().solve(pc.C_perp_k.transpose());
  pc.cond_cov = pc.C_bar_k - X.transpose() * X;
  pc.cond_cov = (0.5 * (pc.cond_cov + pc.cond_cov.transpose())).eval();

  const SymmetricEigen eig = symmetric_eigen(pc.cond_cov, with_sqrt);
  const double scale = std::max({s(0), eig.values.cwiseAbs().maxCoeff(),
                                  pc.C_bar_k.diagonal().cwiseAbs().maxCoeff()});
  const double lo = eig.values(0);
  if (lo < -tol.psd_tol * scale) {
    std::ostringstream msg;
    msg << "conditional covariance is not PSD (eigenvalue " << lo << ")";
    throw PreconditionError(msg.str());
  }
  pc.cond_trace = std::max(eig.values.cwiseMax(0.0).sum(), 0.0);
  pc.cond_lambda_max = std::max(eig.values(eig.values.size() - 1), 0.0);
  if (with_sqrt) {
    const Vector root = eig.values.cwiseMax(0.0).cwiseSqrt();
    pc.cond_cov_sqrt = eig.vectors * root.asDiagonal() * eig.vectors.transpose();
  }
  return pc;
}

DenseMatrix conditional_mean_map(const ProjectedCovariance& pc, const DenseMatrix& Omega_k) {
  if (Omega_k.rows() != pc.k)
    throw PreconditionError("conditional_mean_map: Omega_k must have k rows");
  return pc.C_perp_k * pc.C_k.llt().solve(Omega_k);
}

ProductMoments expect_product_norms(const DenseMatrix& Mhat, const DenseMatrix& covM,
                                    const DenseMatrix& N) {
  if (covM.rows() != Mhat.rows() || Mhat.cols() != N.rows())
    throw PreconditionError("expect_product_norms: dimension mismatch");
  const DenseMatrix MN = Mhat * N;
  const SymmetricEigen eig = symmetric_eigen(covM, false);
  const double lmax = std::max(eig.values(eig.values.size() - 1), 0.0);
  const double tr = eig.values.cwiseMax(0.0).sum();
  const double nf = frobenius_norm(N);
  ProductMoments out;
  out.spectral_upper = spectral_norm(MN) + std::sqrt(lmax) * nf + std::sqrt(tr) * spectral_norm(N);
  out.frobenius_sq_exact = MN.squaredNorm() + tr * nf * nf;
  return out;
}

PinvMoments expect_pinv_norms(const DenseMatrix& covM, const DenseMatrix& N, Index p) {
  const Index k = covM.rows();
  if (covM.cols() != k || N.rows() != k)
    throw PreconditionError("expect_pinv_norms: dimension mismatch");
  if (p <= k + 1) {
    std::ostringstream msg;
    msg << "expect_pinv_norms: inverse Wishart moment needs p > k + 1 (k = " << k
        << ", p = " << p << ")";
    throw PreconditionError(msg.str());
  }
  Eigen::LLT<DenseMatrix> llt(0.5 * (covM + covM.transpose()));
  if (llt.info() != Eigen::Success)
    throw PreconditionError("expect_pinv_norms: covariance is not positive definite");
  const DenseMatrix Y = llt.matrixL().solve(N);  // N^T C^{-1} N = Y^T Y
  const DenseMatrix M = Y.transpose() * Y;
  PinvMoments out;
  out.frobenius_sq_exact = trace_of(M) / static_cast<double>(p - k - 1);
  out.spectral_upper =
      kE * std::sqrt(static_cast<double>(p)) / static_cast<double>(p - k) * std::sqrt(lambda_max_psd(M));
  return out;
}

Lemma6Constants lemma6_constants(const ProjectedCovariance& pc, const DenseMatrix& N, Index p) {
  const Index k = pc.k;
  require_p(k, p, "lemma6_constants");
  if (N.rows() != k || N.cols() != k) throw PreconditionError("lemma6_constants: N must be k x k");

  Eigen::LLT<DenseMatrix> llt(pc.C_k);
  const DenseMatrix CinvN = llt.solve(N);
  const DenseMatrix Y = llt.matrixL().solve(N);
  const DenseMatrix M = Y.transpose() * Y;  // N^T C_k^{-1} N
  const double root_f = std::sqrt(std::max(trace_of(M), 0.0));
  const double root_2 = std::sqrt(lambda_max_psd(M));
  const double cond_f = std::sqrt(pc.cond_trace);
  const double cond_2 = std::sqrt(pc.cond_lambda_max);
  const double pk1 = std::sqrt(static_cast<double>(p - k - 1));
  const double wishart = kE * std::sqrt(static_cast<double>(p)) / static_cast<double>(p - k);

  Lemma6Constants out;
  const DenseMatrix dep = pc.C_perp_k * CinvN;
  out.c_dep_spectral = spectral_norm(dep);
  out.c_dep_frobenius = frobenius_norm(dep);
  out.c_sp = cond_2 * root_f / pk1 + wishart * cond_f * root_2;
  out.c_f = cond_f * root_f / pk1;
  out.c_tot_spectral = out.c_dep_spectral + out.c_sp;
  out.c_tot_frobenius_sq = out.c_dep_frobenius * out.c_dep_frobenius + out.c_f * out.c_f;
  return out;
}

SineExpectations prop1_sine_expectations(const Lemma6Constants& identity_constants, Index k) {
  if (k < 1) throw PreconditionError("prop1_sine_expectations: k must be >= 1");
  const double kk = static_cast<double>(k);
  SineExpectations out;
  out.spectral = phi(identity_constants.c_tot_spectral);
  out.frobenius = std::sqrt(kk) * phi(std::sqrt(identity_constants.c_tot_frobenius_sq / kk));
  return out;
}

double prop2_mean_term(const GaussianSketch& sketch, double Ak_norm, Index p) {
  if (sketch.zero_mean()) return 0.0;
  const Index r = sketch.rank_r;
  if (p >= r) {
    std::ostringstream msg;
    msg << "mean term needs p < rank of the covariance (p = " << p << ", r = " << r << ")";
    throw PreconditionError(msg.str());
  }
  const double rr = static_cast<double>(r);
  return kE * std::sqrt(rr) / (rr - static_cast<double>(p)) * spectral_norm(sketch.mean) /
         std::sqrt(sketch.lambda_r) * Ak_norm;
}

std::string_view to_string(ExpectationVariant v) {
  switch (v) {
    case ExpectationVariant::Thm3: return "thm3";
    case ExpectationVariant::Thm3Squared: return "thm3_squared";
    case ExpectationVariant::Thm3Old: return "thm3_old";
    case ExpectationVariant::Thm4: return "thm4";
    case ExpectationVariant::Thm5: return "thm5";
  }
  return "?";
}

namespace {

void check_ranks(const SvdFactors& svd, Index k, Index p, const char* what) {
  require_p(k, p, what);
  const Index rank = svd.numerical_rank();
  if (p > rank) {
    std::ostringstream msg;
    msg << what << ": p = " << p << " exceeds rank(A) = " << rank;
    throw PreconditionError(msg.str());
  }
}

void check_sketch(const SvdFactors& svd, const GaussianSketch& sketch, Index k, Index p,
                  const char* what) {
  check_ranks(svd, k, p, what);
  if (sketch.rows() != svd.rows())
    throw PreconditionError(std::string(what) + ": sketch and matrix row counts differ");
  if (sketch.mean.size() != 0 && sketch.cols() != p) {
    std::ostringstream msg;
    msg << what << ": sketch mean has " << sketch.cols() << " columns, p = " << p;
    throw PreconditionError(msg.str());
  }
  if (p > sketch.rank_r) {
    std::ostringstream msg;
    msg << what << ": p = " << p << " exceeds the covariance rank " << sketch.rank_r;
    throw PreconditionError(msg.str());
  }
}

DenseMatrix diag_of(const Vector& v) { return v.asDiagonal(); }

ExpectationBoundReport base_report(Norm norm, ExpectationVariant v, Index k, Index p, double mean) {
  ExpectationBoundReport rep;
  rep.norm = norm;
  rep.variant = v;
  rep.k = k;
  rep.p = p;
  rep.mean_term = mean;
  return rep;
}

}  // namespace

ExpectationBoundReport theorem3_bound(const SvdFactors& svd, const ProjectedCovariance& pc,
                                      double mean_term, Index p) {
  const Index k = pc.k;
  check_ranks(svd, k, p, "theorem3_bound");
  auto rep = base_report(Norm::Frobenius, ExpectationVariant::Thm3, k, p, mean_term);
  rep.head = lemma6_constants(pc, diag_of(svd.sigma.head(k)), p);
  rep.identity = lemma6_constants(pc, DenseMatrix::Identity(k, k), p);
  rep.a_k = rep.head.c_tot_frobenius_sq;
  rep.b_k = rep.identity.c_tot_frobenius_sq;
  const double kk = static_cast<double>(k);
  const double sine = std::sqrt(kk) * phi(std::sqrt(*rep.b_k / kk)) * svd.sigma(0);
  rep.bound = mean_term + std::min(std::sqrt(*rep.a_k), sine);
  return rep;
}

ExpectationBoundReport theorem3_squared_bound(const SvdFactors& svd, const ProjectedCovariance& pc,
                                              Index p) {
  auto rep = theorem3_bound(svd, pc, 0.0, p);
  rep.variant = ExpectationVariant::Thm3Squared;
  const double kk = static_cast<double>(pc.k);
  const double f = phi(std::sqrt(*rep.b_k / kk));
  rep.bound = std::min(*rep.a_k, kk * f * f * svd.sigma(0) * svd.sigma(0));
  return rep;
}

ExpectationBoundReport theorem3_old_bound(const SvdFactors& svd, const ProjectedCovariance& pc, Index p) {
  auto rep = theorem3_squared_bound(svd, pc, p);
  rep.variant = ExpectationVariant::Thm3Old;
  const Index k = pc.k;
  const double tail = k < svd.size() ? svd.sigma.tail(svd.size() - k).norm() : 0.0;
  rep.bound = std::sqrt(tail * tail + rep.bound) - tail;
  return rep;
}

ExpectationBoundReport theorem4_bound(const SvdFactors& svd, const ProjectedCovariance& pc,
                                      double mean_term, Index p) {
  const Index k = pc.k;
  check_ranks(svd, k, p, "theorem4_bound");
  auto rep = base_report(Norm::Spectral, ExpectationVariant::Thm4, k, p, mean_term);
  rep.head = lemma6_constants(pc, diag_of(svd.sigma.head(k)), p);
  rep.identity = lemma6_constants(pc, DenseMatrix::Identity(k, k), p);
  rep.c_k = rep.head.c_tot_spectral;
  rep.d_k = rep.identity.c_tot_spectral;
  rep.bound = mean_term + std::min(*rep.c_k, phi(*rep.d_k) * svd.sigma(0));
  return rep;
}

ExpectationBoundReport theorem5_bound(const SvdFactors& svd, const ProjectedCovariance& pc,
                                      double mean_term, Index p) {
  const Index k = pc.k;
  check_ranks(svd, k, p, "theorem5_bound");
  auto rep = base_report(Norm::Spectral, ExpectationVariant::Thm5, k, p, mean_term);
  const Vector hat = deflated_head(svd, k);
  rep.head = lemma6_constants(pc, diag_of(hat), p);
  rep.identity = lemma6_constants(pc, DenseMatrix::Identity(k, k), p);
  rep.c_hat_k = rep.head.c_tot_spectral;
  rep.d_hat_k = rep.identity.c_tot_spectral;
  rep.bound = mean_term + std::min(*rep.c_hat_k, phi(*rep.d_hat_k) * hat(0));
  return rep;
}

ExpectationBoundReport theorem3_bound(const SvdFactors& svd, const GaussianSketch& sketch, Index k,
                                      Index p) {
  check_sketch(svd, sketch, k, p, "theorem3_bound");
  const double mean = prop2_mean_term(sketch, svd.sigma.head(k).norm(), p);
  return theorem3_bound(svd, project_covariance(sketch.covariance, svd, k, false), mean, p);
}

ExpectationBoundReport theorem3_squared_bound(const SvdFactors& svd, const GaussianSketch& sketch,
                                              Index k, Index p) {
  check_sketch(svd, sketch, k, p, "theorem3_squared_bound");
  if (!sketch.zero_mean())
    throw PreconditionError("theorem3_squared_bound: only defined for a centered sketch");
  return theorem3_squared_bound(svd, project_covariance(sketch.covariance, svd, k, false), p);
}

ExpectationBoundReport theorem3_old_bound(const SvdFactors& svd, const GaussianSketch& sketch,
                                              Index k, Index p) {
  check_sketch(svd, sketch, k, p, "theorem3_old_bound");
  if (!sketch.zero_mean())
    throw PreconditionError("theorem3_old_bound: only defined for a centered sketch");
  return theorem3_old_bound(svd, project_covariance(sketch.covariance, svd, k, false), p);
}

ExpectationBoundReport theorem4_bound(const SvdFactors& svd, const GaussianSketch& sketch, Index k,
                                      Index p) {
  check_sketch(svd, sketch, k, p, "theorem4_bound");
  const double mean = prop2_mean_term(sketch, svd.sigma(0), p);
  return theorem4_bound(svd, project_covariance(sketch.covariance, svd, k, false), mean, p);
}

ExpectationBoundReport theorem5_bound(const SvdFactors& svd, const GaussianSketch& sketch, Index k,
                                      Index p) {
  check_sketch(svd, sketch, k, p, "theorem5_bound");
  const double mean = prop2_mean_term(sketch, svd.sigma(0), p);
  return theorem5_bound(svd, project_covariance(sketch.covariance, svd, k, false), mean, p);
}

}  // namespace sketchbound
