#pragma once

#include "sketchbound/matcore.hpp"

#include <optional>
#include <string_view>

namespace sketchbound {

/// Singular spectrum and RSVD parameters. sigma holds the nonzero singular
/// values (descending) up to the numerical rank of A.
struct SpectrumProfile {
  Vector sigma;
  Index k = 0;
  Index p = 0;
  Index q = 0;

  /// Truncates sigma to its numerical rank (values above pinv_tol * sigma_1)
  /// and validates 1 <= k <= p - 2, p <= min(n, m), q >= 0.
  static SpectrumProfile make(const Vector& sigma, Index k, Index p, Index q,
                              Index max_p = -1);
  Vector gamma() const;
};

/// gamma_i = sigma_{k+1} / sigma_i for i = 1..rank (0-based vector).
Vector gamma_ratios(const Vector& sigma, Index k);

enum class RsvdVariant { Frobenius, Spectral, SpectralImproved, HmtFrobenius, HmtSpectral, HmtPower };

std::string_view to_string(RsvdVariant v);

struct RsvdBoundReport {
  Norm norm = Norm::Frobenius;
  RsvdVariant variant = RsvdVariant::Frobenius;
  Index k = 0, p = 0, q = 0;
  std::optional<double> a_k, b_k, c_k, d_k, c_hat_k, d_hat_k;
  std::optional<Index> ell;  // 1-based
  double bound = 0.0;
};

RsvdBoundReport cor_frobenius(const SpectrumProfile& profile);
RsvdBoundReport cor_spectral(const SpectrumProfile& profile);
/// 1-based index l in {1..k}.
Index ell_index(const SpectrumProfile& profile);
RsvdBoundReport cor_spectral_improved(const SpectrumProfile& profile);

// Reference bounds on E||(I - pi(Z)) A|| (not the deflated metrics).
double hmt_frobenius(const Vector& sigma, Index k, Index p);
double hmt_spectral(const Vector& sigma, Index k, Index p);
double hmt_power(const Vector& sigma, Index k, Index p, Index q);

}  // namespace sketchbound
