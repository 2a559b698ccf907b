#pragma once

#include "sketchbound/matcore.hpp"
#include "sketchbound/sketch.hpp"

#include <optional>
#include <string_view>

namespace sketchbound {

/// Blocks of U^T C U for the rank-k partition and the conditional covariance
/// of Omega_bar_k given Omega_k (Schur complement).
struct ProjectedCovariance {
  Index k = 0;
  DenseMatrix C_k;        // U_k^T C U_k
  DenseMatrix C_perp_k;   // Ubar_k^T C U_k
  DenseMatrix C_bar_k;    // Ubar_k^T C Ubar_k
  DenseMatrix cond_cov;   // C_bar_k - C_perp_k C_k^{-1} C_perp_k^T
  DenseMatrix cond_cov_sqrt;  // empty unless requested
  double cond_trace = 0.0;        // ||cond_cov^{1/2}||_F^2
  double cond_lambda_max = 0.0;   // ||cond_cov^{1/2}||_2^2
};

/// Throws PreconditionError when C_k is numerically singular or the Schur
/// complement is not PSD within psd_tol * ||C||_2.
ProjectedCovariance project_covariance(const DenseMatrix& C, const SvdFactors& svd, Index k,
                                       bool with_sqrt = true,
                                       const Tolerances& tol = kDefaultTolerances);

/// E[Omega_bar_k | Omega_k] = C_perp_k C_k^{-1} Omega_k.
DenseMatrix conditional_mean_map(const ProjectedCovariance& pc, const DenseMatrix& Omega_k);

struct ProductMoments {
  double spectral_upper = 0.0;      // bound on E||M N||_2
  double frobenius_sq_exact = 0.0;  // E||M N||_F^2
};

/// Moments of M N for M ~ N(Mhat, covM) with independent columns of
/// covariance covM (rows(Mhat) x rows(Mhat)).
ProductMoments expect_product_norms(const DenseMatrix& Mhat, const DenseMatrix& covM,
                                    const DenseMatrix& N);

struct PinvMoments {
  double frobenius_sq_exact = 0.0;  // E||M^+ N||_F^2
  double spectral_upper = 0.0;      // bound on E||M^+ N||_2
};

/// Moments of M^+ N for centered M ~ N(0, covM) of size k x p. Requires
/// p > k + 1.
PinvMoments expect_pinv_norms(const DenseMatrix& covM, const DenseMatrix& N, Index p);

struct Lemma6Constants {
  double c_dep_spectral = 0.0;
  double c_dep_frobenius = 0.0;
  double c_sp = 0.0;
  double c_f = 0.0;
  double c_tot_spectral = 0.0;      // c_dep_spectral + c_sp
  double c_tot_frobenius_sq = 0.0;  // c_dep_frobenius^2 + c_f^2
};

/// Requires p >= k + 2.
Lemma6Constants lemma6_constants(const ProjectedCovariance& pc, const DenseMatrix& N, Index p);

struct SineExpectations {
  double spectral = 0.0;
  double frobenius = 0.0;
};

/// Upper bounds on E||S_k||_2 and E||S_k||_F from constants evaluated at N = I_k.
SineExpectations prop1_sine_expectations(const Lemma6Constants& identity_constants, Index k);

/// e sqrt(r)/(r - p) ||Zhat||_2 / sqrt(lambda_r) * Ak_norm; 0 when Zhat = 0.
double prop2_mean_term(const GaussianSketch& sketch, double Ak_norm, Index p);

enum class ExpectationVariant { Thm3, Thm3Squared, Thm3Old, Thm4, Thm5 };

std::string_view to_string(ExpectationVariant v);

struct ExpectationBoundReport {
  Norm norm = Norm::Frobenius;
  ExpectationVariant variant = ExpectationVariant::Thm3;
  Index k = 0;
  Index p = 0;
  double mean_term = 0.0;
  std::optional<double> a_k, b_k, c_k, d_k, c_hat_k, d_hat_k;
  Lemma6Constants head;      // N = Sigma_k (or the deflated head for Thm5)
  Lemma6Constants identity;  // N = I_k
  double bound = 0.0;
};

ExpectationBoundReport theorem3_bound(const SvdFactors& svd, const GaussianSketch& sketch, Index k,
                                      Index p);
ExpectationBoundReport theorem3_squared_bound(const SvdFactors& svd, const GaussianSketch& sketch,
                                              Index k, Index p);
ExpectationBoundReport theorem4_bound(const SvdFactors& svd, const GaussianSketch& sketch, Index k,
                                      Index p);
ExpectationBoundReport theorem5_bound(const SvdFactors& svd, const GaussianSketch& sketch, Index k,
                                      Index p);

// Variants reusing a projected covariance across p. The caller supplies the
// mean term (0 for centered sketches).
ExpectationBoundReport theorem3_bound(const SvdFactors& svd, const ProjectedCovariance& pc,
                                      double mean_term, Index p);
/// Bound on E||(I - pi(Z)) A||_F - ||Abar_k||_F for a centered sketch:
/// sqrt(||Abar_k||_F^2 + squared bound) - ||Abar_k||_F (Jensen).
ExpectationBoundReport theorem3_old_bound(const SvdFactors& svd, const GaussianSketch& sketch, Index k,
                                          Index p);
ExpectationBoundReport theorem3_old_bound(const SvdFactors& svd, const ProjectedCovariance& pc, Index p);
ExpectationBoundReport theorem3_squared_bound(const SvdFactors& svd, const ProjectedCovariance& pc,
                                              Index p);
ExpectationBoundReport theorem4_bound(const SvdFactors& svd, const ProjectedCovariance& pc,
                                      double mean_term, Index p);
ExpectationBoundReport theorem5_bound(const SvdFactors& svd, const ProjectedCovariance& pc,
                                      double mean_term, Index p);

}  // namespace sketchbound
