#include "sketchbound/detbounds.hpp"
#include "sketchbound/errors.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace sketchbound;
using namespace testutil;

namespace {

SvdFactors identity_factors(const Vector& sigma) {
  const Index n = sigma.size();
  return SvdFactors{DenseMatrix::Identity(n, n), sigma, DenseMatrix::Identity(n, n)};
}

// (I + T T^T)^{-1/2} T formed literally.
DenseMatrix sine_operator_oracle(const DenseMatrix& T) {
  const Index n = T.rows();
  const DenseMatrix root = psd_sqrt(DenseMatrix::Identity(n, n) + T * T.transpose());
  return root.inverse() * T;
}

}  // namespace

TEST_CASE("phi") {
  CHECK(phi(0) == 0.0);
  CHECK(phi(1) == doctest::Approx(0.70710678118654752));
  CHECK(std::abs(phi(1e8) - 1.0) < 1e-8);
  CHECK_THROWS_AS(phi(-1e-3), PreconditionError);
  double prev = 0.0;
  for (double x = 0.1; x < 10; x += 0.1) {
    CHECK(phi(x) > prev);
    CHECK(phi(x) < 1.0);
    prev = phi(x);
  }
}

TEST_CASE("aligned sketch gives zero angle operators") {
  Vector s(5);
  s << 5, 4, 3, 2, 1;
  const SvdFactors f = svd(with_spectrum(5, 5, s, 3));
  const AngleOperators ops = angle_operators(f, f.Uk(2), DenseMatrix(), 2);
  CHECK((ops.Omega_k - DenseMatrix::Identity(2, 2)).norm() < 1e-12);
  CHECK(ops.Omega_bar_k.norm() < 1e-12);
  CHECK(ops.T_k.norm() < 1e-12);
  CHECK(ops.S_k.norm() < 1e-12);
}

TEST_CASE("two dimensional hand case") {
  Vector s(2);
  s << 2, 1;
  const SvdFactors f = identity_factors(s);
  const double theta = 0.3;
  DenseMatrix Z(2, 1);
  Z << std::cos(theta), std::sin(theta);
  const AngleOperators ops = angle_operators(f, Z, 1);
  CHECK(ops.T_k(0, 0) == doctest::Approx(std::tan(theta)).epsilon(1e-12));
  CHECK(ops.S_k(0, 0) == doctest::Approx(std::sin(theta)).epsilon(1e-12));
  CHECK(ops.sigma_S(0) == doctest::Approx(std::sin(theta)).epsilon(1e-12));
}

TEST_CASE("sines are canonical angles and phi of the tangents") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const DenseMatrix A = gaussian(30, 20, 100 + seed);
    const SvdFactors f = svd(A);
    const Index k = 1 + static_cast<Index>(seed % 5);
    const DenseMatrix Z = gaussian(30, 8, 200 + seed);
    const AngleOperators ops = angle_operators(f, Z, k);
    for (Index i = 0; i < ops.sigma_T.size(); ++i)
      CHECK(std::abs(ops.sigma_S(i) - phi(ops.sigma_T(i))) < 1e-10);
    CHECK(ops.sigma_S.maxCoeff() < 1.0);

    const DenseMatrix basis = orthonormal_basis(Z * pseudo_inverse(ops.Omega_k));
    const Vector angles = canonical_angle_sines(basis, f.Uk(k));
    REQUIRE(angles.size() == k);
    for (Index i = 0; i < k; ++i) CHECK(std::abs(angles(i) - ops.sigma_S(i)) < 1e-9);

    const DenseMatrix S = sine_operator_oracle(ops.T_k);
    CHECK((S - ops.S_k).norm() < 1e-10 * std::max(1.0, S.norm()));
  }
}

TEST_CASE("rank deficient Omega_k is rejected") {
  Vector s(4);
  s << 4, 3, 2, 1;
  const SvdFactors f = identity_factors(s);
  DenseMatrix Z = DenseMatrix::Zero(4, 3);
  Z(0, 0) = 1;
  Z(2, 1) = 1;
  Z(3, 2) = 1;  // nothing along e2, so U_2^T Z has rank one
  CHECK_THROWS_AS(angle_operators(f, Z, 2), PreconditionError);
  CHECK_THROWS_AS(angle_operators(f, Z, 4), PreconditionError);
}

TEST_CASE("general_metric") {
  const DenseMatrix A = gaussian(40, 30, 5);
  const SvdFactors f = svd(A);
  for (Norm w : {Norm::Frobenius, Norm::Spectral}) {
    CHECK(std::abs(general_metric(A, f, f.Uk(4), 4, w)) < 1e-10 * A.squaredNorm());
  }
  DenseMatrix B = gaussian(12, 3, 6) * gaussian(3, 9, 7);
  const SvdFactors fb = svd(B);
  CHECK(std::abs(general_metric(B, fb, B.leftCols(3), 3, Norm::Frobenius)) < 1e-10 * B.squaredNorm());
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DenseMatrix Z = gaussian(40, 6, 300 + seed);
    CHECK(general_metric(A, f, Z, 3, Norm::Frobenius) >= -1e-10);
  }
}

TEST_CASE("Frobenius split identity") {
  const DenseMatrix A = gaussian(25, 18, 8);
  const SvdFactors f = svd(A);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Index k = 1 + static_cast<Index>(seed % 6);
    const DenseMatrix Q = orthonormal_basis(gaussian(25, 7, 400 + seed));
    const DenseMatrix Ak = f.Uk(k) * f.Sigma_k(k) * f.Vk(k).transpose();
    const DenseMatrix Abar = A - Ak;
    auto res = [&](const DenseMatrix& M) { return (M - Q * (Q.transpose() * M)).squaredNorm(); };
    CHECK(rel_err(res(Ak) + res(Abar), res(A)) < 1e-9);
  }
}

TEST_CASE("theorem 1") {
  SUBCASE("aligned sketch") {
    const DenseMatrix A = gaussian(20, 15, 9);
    const SvdFactors f = svd(A);
    for (Norm w : {Norm::Frobenius, Norm::Spectral}) {
      const auto rep = theorem1_bound(A, f, f.Uk(3), 3, w);
      CHECK(rep.bound < 1e-20);
      CHECK(std::abs(rep.lhs_general_metric) < 1e-10);
    }
  }
  SUBCASE("random instances") {
    const DenseMatrix A = gaussian(60, 40, 10);
    const SvdFactors f = svd(A);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const DenseMatrix Z = gaussian(60, 12, 500 + seed);
      for (Norm w : {Norm::Frobenius, Norm::Spectral}) {
        const auto rep = theorem1_bound(A, f, Z, 5, w);
        CHECK(rep.lhs_general_metric <= rep.bound + 1e-9);
        CHECK(rep.bound == std::min(rep.bound_sine, rep.bound_tangent));
        CHECK(rep.bound_sine >= 0.0);
      }
    }
  }
  SUBCASE("large tangent favours the sine branch") {
    Vector s(2);
    s << 2, 1;
    const SvdFactors f = identity_factors(s);
    DenseMatrix Z(2, 1);
    const double theta = 1.5;
    Z << std::cos(theta), std::sin(theta);
    const auto rep = theorem1_bound(f, Z, 1, Norm::Spectral);
    CHECK(rep.bound_sine < rep.bound_tangent);
    CHECK(rep.bound_sine == doctest::Approx(4 * std::sin(theta) * std::sin(theta)));
  }
}

TEST_CASE("theorem 2") {
  SUBCASE("exact rank k: deflation vanishes") {
    const DenseMatrix A = gaussian(15, 3, 11) * gaussian(3, 10, 12);
    const SvdFactors f = svd(A);
    const DenseMatrix Z = gaussian(15, 5, 13);
    const auto t1 = theorem1_bound(A, f, Z, 3, Norm::Spectral);
    const auto t2 = theorem2_bound(A, f, Z, 3);
    CHECK(rel_err(t2.bound, t1.bound) < 1e-8);
  }
  SUBCASE("flat spectrum") {
    Vector s = Vector::Ones(6);
    s(4) = 0.5;
    s(5) = 0.2;
    const DenseMatrix A = with_spectrum(6, 6, s, 14);
    const SvdFactors f = svd(A);
    const DenseMatrix Z = gaussian(6, 4, 15);
    const auto rep = theorem2_bound(A, f, Z, 2);
    CHECK(rep.bound < 1e-12);
    CHECK(rep.lhs_general_metric <= 1e-12);
  }
  SUBCASE("never looser than theorem 1") {
    const DenseMatrix A = gaussian(60, 40, 16);
    const SvdFactors f = svd(A);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const DenseMatrix Z = gaussian(60, 12, 700 + seed);
      const Index k = 1 + static_cast<Index>(seed % 10);
      const auto t1 = theorem1_bound(A, f, Z, k, Norm::Spectral);
      const auto t2 = theorem2_bound(A, f, Z, k);
      CHECK(t2.bound <= t1.bound + 1e-12);
      CHECK(t2.lhs_general_metric <= t2.bound + 1e-9);
    }
  }
}

TEST_CASE("Lemma 1 ordering chain") {
  const DenseMatrix A = gaussian(40, 30, 17);
  const SvdFactors f = svd(A);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Index k = 1 + static_cast<Index>(seed % 8);
    const DenseMatrix Z = gaussian(40, 9, 800 + seed);
    const AngleOperators ops = angle_operators(f, Z, k);
    const DenseMatrix R = projected_head_residual(f, Z, k);
    const DenseMatrix StS = ops.S_k.transpose() * ops.S_k;
    const DenseMatrix TtT = ops.T_k.transpose() * ops.T_k;
    CHECK(psd_order(R, StS, 1e-9).satisfied);
    CHECK(psd_order(StS, TtT, 1e-9).satisfied);
  }
}
