#include "sketchbound/rsvdbounds.hpp"

#include "sketchbound/detbounds.hpp"
#include "sketchbound/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace sketchbound {

namespace {

constexpr double kE = std::numbers::e;

double wishart_factor(Index p, Index k) {
  return kE * std::sqrt(static_cast<double>(p)) / static_cast<double>(p - k);
}

void require_profile(const SpectrumProfile& s, const char* what) {
  if (s.k < 1 || s.p < s.k + 2) {
    std::ostringstream msg;
    msg << what << ": need 1 <= k <= p - 2 (k = " << s.k << ", p = " << s.p << ")";
    throw PreconditionError(msg.str());
  }
  if (s.q < 0) throw PreconditionError(std::string(what) + ": q must be >= 0");
  if (s.sigma.size() < s.k) throw PreconditionError(std::string(what) + ": k exceeds rank");
}

double sigma_next(const Vector& sigma, Index k) { return k < sigma.size() ? sigma(k) : 0.0; }

// sum_{i >= from} (sigma_i / ref)^power, 0-based
double tail_power_sum(const Vector& sigma, Index from, double ref, double power) {
  double s = 0.0;
  for (Index i = from; i < sigma.size(); ++i) s += std::pow(sigma(i) / ref, power);
  return s;
}

}  // namespace

SpectrumProfile SpectrumProfile::make(const Vector& sigma, Index k, Index p, Index q, Index max_p) {
  if (sigma.size() == 0 || !(sigma(0) > 0.0))
    throw PreconditionError("spectrum must have a positive leading singular value");
  for (Index i = 1; i < sigma.size(); ++i)
    if (sigma(i) > sigma(i - 1)) throw PreconditionError("spectrum must be sorted descending");
  Index rank = 0;
  const double cut = kDefaultTolerances.pinv_tol * sigma(0);
  while (rank < sigma.size() && sigma(rank) > cut) ++rank;
  SpectrumProfile out;
  out.sigma = sigma.head(rank);
  out.k = k;
  out.p = p;
  out.q = q;
  require_profile(out, "spectrum profile");
  const Index limit = max_p < 0 ? sigma.size() : max_p;
  if (p > limit) {
    std::ostringstream msg;
    msg << "spectrum profile: p = " << p << " exceeds " << limit;
    throw PreconditionError(msg.str());
  }
  return out;
}

Vector SpectrumProfile::gamma() const { return gamma_ratios(sigma, k); }

Vector gamma_ratios(const Vector& sigma, Index k) {
  if (k < 0 || k + 1 > sigma.size()) {
    std::ostringstream msg;
    msg << "gamma_ratios: k + 1 = " << k + 1 << " exceeds the spectrum length " << sigma.size();
    throw PreconditionError(msg.str());
  }
  for (Index i = 0; i < sigma.size(); ++i)
    if (!(sigma(i) > 0.0)) throw PreconditionError("gamma_ratios: singular values must be positive");
  return sigma(k) * sigma.cwiseInverse();
}

std::string_view to_string(RsvdVariant v) {
  switch (v) {
    case RsvdVariant::Frobenius: return "cor_frobenius";
    case RsvdVariant::Spectral: return "cor_spectral";
    case RsvdVariant::SpectralImproved: return "cor_spectral_improved";
    case RsvdVariant::HmtFrobenius: return "hmt_frobenius";
    case RsvdVariant::HmtSpectral: return "hmt_spectral";
    case RsvdVariant::HmtPower: return "hmt_power";
  }
  return "?";
}

RsvdBoundReport cor_frobenius(const SpectrumProfile& s) {
  require_profile(s, "cor_frobenius");
  RsvdBoundReport rep;
  rep.norm = Norm::Frobenius;
  rep.variant = RsvdVariant::Frobenius;
  rep.k = s.k;
  rep.p = s.p;
  rep.q = s.q;
  const Index k = s.k;
  const double next = sigma_next(s.sigma, k);
  const double pk1 = static_cast<double>(s.p - k - 1);
  const double kk = static_cast<double>(k);
  if (next == 0.0) {
    rep.a_k = 0.0;
    rep.b_k = 0.0;
  } else {
    // gamma_i^{-(4q+2)} = (sigma_i / sigma_{k+1})^{4q+2}
    const double e = static_cast<double>(4 * s.q);
    const double tail = tail_power_sum(s.sigma, k, next, e + 2.0);
    double head_a = 0.0, head_b = 0.0;
    for (Index i = 0; i < k; ++i) {
      const double g = next / s.sigma(i);
      head_a += std::pow(g, e);
      head_b += std::pow(g, e + 2.0);
    }
    rep.a_k = next * next / pk1 * tail * head_a;
    rep.b_k = tail * head_b / pk1;
  }
  rep.bound = std::min(std::sqrt(*rep.a_k), std::sqrt(kk) * phi(std::sqrt(*rep.b_k / kk)) * s.sigma(0));
  return rep;
}

RsvdBoundReport cor_spectral(const SpectrumProfile& s) {
  require_profile(s, "cor_spectral");
  RsvdBoundReport rep;
  rep.norm = Norm::Spectral;
  rep.variant = RsvdVariant::Spectral;
  rep.k = s.k;
  rep.p = s.p;
  rep.q = s.q;
  const Index k = s.k;
  const double next = sigma_next(s.sigma, k);
  const double pk1 = std::sqrt(static_cast<double>(s.p - k - 1));
  const double w = wishart_factor(s.p, k);
  const double e = static_cast<double>(4 * s.q);
  double head_c = 0.0, head_d = 0.0;
  for (Index i = 0; i < k; ++i) {
    const double g = next / s.sigma(i);
    head_c += std::pow(g, e);
    head_d += std::pow(g, e + 2.0);
  }
  const double sk = s.sigma(k - 1);
  const double tail = std::sqrt(tail_power_sum(s.sigma, k, sk, e + 2.0));
  rep.c_k = next / pk1 * std::sqrt(head_c) + sk * tail * w;
  rep.d_k = std::sqrt(head_d) / pk1 + tail * w;
  rep.bound = std::min(*rep.c_k, phi(*rep.d_k) * s.sigma(0));
  return rep;
}

Index ell_index(const SpectrumProfile& s) {
  require_profile(s, "ell_index");
  if (s.q == 0) return 1;
  const Index k = s.k;
  const double next = sigma_next(s.sigma, k);
  const double t = next * std::sqrt(1.0 + 1.0 / (2.0 * static_cast<double>(s.q)));
  if (t >= s.sigma(0)) return 1;
  if (t <= s.sigma(k - 1)) return k;
  // 0-based bracket sigma(i+1) <= t <= sigma(i) with i + 1 <= k - 1
  Index i = 0;
  while (i + 1 < k && !(s.sigma(i + 1) <= t)) ++i;
  const double two_q = static_cast<double>(2 * s.q);
  auto psi = [&](Index j) {
    const double g = next / s.sigma(j);
    return std::sqrt(std::max(1.0 - g * g, 0.0)) / std::pow(s.sigma(j), two_q);
  };
  return psi(i + 1) > psi(i) ? i + 2 : i + 1;
}

RsvdBoundReport cor_spectral_improved(const SpectrumProfile& s) {
  require_profile(s, "cor_spectral_improved");
  RsvdBoundReport rep;
  rep.norm = Norm::Spectral;
  rep.variant = RsvdVariant::SpectralImproved;
  rep.k = s.k;
  rep.p = s.p;
  rep.q = s.q;
  const Index k = s.k;
  const Index ell = ell_index(s);
  rep.ell = ell;
  const double next = sigma_next(s.sigma, k);
  const double pk1 = std::sqrt(static_cast<double>(s.p - k - 1));
  const double w = wishart_factor(s.p, k);
  const double e = static_cast<double>(4 * s.q);
  double head_c = 0.0, head_d = 0.0;
  for (Index i = 0; i < k; ++i) {
    const double g = next / s.sigma(i);
    head_c += std::pow(g, e) * (1.0 - g * g);
    head_d += std::pow(g, e + 2.0);
  }
  const double sl = s.sigma(ell - 1);
  const double gl = next / sl;
  const double tail_l = std::sqrt(tail_power_sum(s.sigma, k, sl, e + 2.0));
  rep.c_hat_k = next / pk1 * std::sqrt(std::max(head_c, 0.0)) +
                std::sqrt(std::max(1.0 - gl * gl, 0.0)) * sl * tail_l * w;
  const double sk = s.sigma(k - 1);
  rep.d_hat_k = std::sqrt(head_d) / pk1 + std::sqrt(tail_power_sum(s.sigma, k, sk, e + 2.0)) * w;
  const double deflated = std::sqrt(std::max(s.sigma(0) * s.sigma(0) - next * next, 0.0));
  rep.bound = std::min(*rep.c_hat_k, phi(*rep.d_hat_k) * deflated);
  return rep;
}

namespace {

void require_hmt(const Vector& sigma, Index k, Index p, Index min_gap, const char* what) {
  if (k < 1 || p < k + min_gap || k > sigma.size()) {
    std::ostringstream msg;
    msg << what << ": need 1 <= k and p >= k + " << min_gap << " (k = " << k << ", p = " << p
        << ")";
    throw PreconditionError(msg.str());
  }
}

double tail_norm(const Vector& sigma, Index k, double power) {
  double s = 0.0;
  for (Index i = k; i < sigma.size(); ++i) s += std::pow(sigma(i), 2.0 * power);
  return std::sqrt(s);
}

}  // namespace

double hmt_frobenius(const Vector& sigma, Index k, Index p) {
  require_hmt(sigma, k, p, 2, "hmt_frobenius");
  const double kk = static_cast<double>(k);
  return std::sqrt(1.0 + kk / static_cast<double>(p - k - 1)) * tail_norm(sigma, k, 1.0);
}

double hmt_spectral(const Vector& sigma, Index k, Index p) {
  return hmt_power(sigma, k, p, 0);
}

double hmt_power(const Vector& sigma, Index k, Index p, Index q) {
  require_hmt(sigma, k, p, 2, q == 0 ? "hmt_spectral" : "hmt_power");
  if (q < 0) throw PreconditionError("hmt_power: q must be >= 0");
  const double kk = static_cast<double>(k);
  const double power = static_cast<double>(2 * q + 1);
  const double next = sigma_next(sigma, k);
  const double inner = (1.0 + std::sqrt(kk / static_cast<double>(p - k - 1))) * std::pow(next, power) +
                       wishart_factor(p, k) * tail_norm(sigma, k, power);
  return std::pow(inner, 1.0 / power);
}

}  // namespace sketchbound
