#include "sketchbound/residuals.hpp"

#include "sketchbound/errors.hpp"

#include <cmath>

namespace sketchbound {

namespace {

// 1 - |W_j|^2 below this is recomputed from the residual vector
constexpr double kExactGap = 1e-4;

}  // namespace

ResidualEngine::ResidualEngine(const SvdFactors& svd, Index dense_limit)
    : U_(svd.U.leftCols(svd.size())), sigma_(svd.sigma), dense_limit_(dense_limit) {}

double ResidualEngine::tail_norm(Index k, Norm norm) const {
  if (k >= sigma_.size()) return 0.0;
  return norm == Norm::Spectral ? sigma_(k) : sigma_.tail(sigma_.size() - k).norm();
}

ResidualEngine::Coordinates ResidualEngine::coordinates(const DenseMatrix& Q) const {
  return coordinates(Q, U_.transpose() * Q);
}

ResidualEngine::Coordinates ResidualEngine::coordinates(const DenseMatrix& Q, DenseMatrix W) const {
  if (Q.rows() != U_.rows() || W.rows() != U_.cols() || W.cols() != Q.cols())
    throw PreconditionError("residual: basis and coordinates do not conform");
  Coordinates c;
  c.W = std::move(W);
  const Vector captured = c.W.rowwise().squaredNorm();
  for (Index j = 0; j < captured.size(); ++j)
    if (1.0 - captured(j) < kExactGap) c.exact.push_back(j);
  if (c.exact.empty()) return c;

  const Index e = static_cast<Index>(c.exact.size());
  DenseMatrix R(U_.rows(), e);
  for (Index a = 0; a < e; ++a) R.col(a) = U_.col(c.exact[static_cast<std::size_t>(a)]);
  for (int pass = 0; pass < 2; ++pass) R.noalias() -= Q * (Q.transpose() * R);
  c.H = U_.transpose() * R;
  for (Index a = 0; a < e; ++a)
    for (Index b = 0; b < a; ++b) {
      const Index i = c.exact[static_cast<std::size_t>(a)], j = c.exact[static_cast<std::size_t>(b)];
      const double avg = 0.5 * (c.H(i, b) + c.H(j, a));
      c.H(i, b) = avg;
      c.H(j, a) = avg;
    }
  return c;
}

void ResidualEngine::check(const Coordinates& c) const {
  if (c.W.rows() != sigma_.size()) throw PreconditionError("residual: coordinate matrix has wrong row count");
}

ResidualEngine::Norms ResidualEngine::frobenius(const Coordinates& c, Index k) const {
  check(c);
  Vector gap = (1.0 - c.W.rowwise().squaredNorm().array()).cwiseMax(0.0);
  for (std::size_t a = 0; a < c.exact.size(); ++a) {
    const Index j = c.exact[a];
    gap(j) = std::max(c.H(j, static_cast<Index>(a)), 0.0);
  }
  double full = 0.0, deflated = 0.0;
  for (Index j = 0; j < sigma_.size(); ++j) {
    const double term = sigma_(j) * sigma_(j) * gap(j);
    full += term;
    if (j >= k) deflated += term;
  }
  return {std::sqrt(full), std::sqrt(deflated)};
}

// Largest eigenvalue of Sigma G Sigma restricted to indices >= from.
double ResidualEngine::top_eigenvalue(const Coordinates& c, Index from) const {
  const Index r = sigma_.size() - from;
  if (r <= 0) return 0.0;
  const auto s = sigma_.tail(r);
  const auto Wt = c.W.bottomRows(r);

  // local positions of the exact columns and their G columns
  std::vector<Index> pos;
  std::vector<Index> src;
  for (std::size_t a = 0; a < c.exact.size(); ++a)
    if (c.exact[a] >= from) {
      pos.push_back(c.exact[a] - from);
      src.push_back(static_cast<Index>(a));
    }
  const Index e = static_cast<Index>(pos.size());

  if (r <= dense_limit_) {
    DenseMatrix G = -Wt * Wt.transpose();
    G.diagonal().array() += 1.0;
    for (Index a = 0; a < e; ++a) {
      const Vector h = c.H.col(src[static_cast<std::size_t>(a)]).tail(r);
      G.col(pos[static_cast<std::size_t>(a)]) = h;
      G.row(pos[static_cast<std::size_t>(a)]) = h.transpose();
    }
    const DenseMatrix M = s.asDiagonal() * G * s.asDiagonal();
    return std::max(max_eigenvalue(0.5 * (M + M.transpose())), 0.0);
  }

  // exact columns of G restricted to the window
  DenseMatrix HJ(r, e);
  for (Index a = 0; a < e; ++a) HJ.col(a) = c.H.col(src[static_cast<std::size_t>(a)]).tail(r);
  return lanczos_max_eigenvalue(
      [&](const Vector& x, Vector& y) {
        // G z = G(:, N) z_N + G(:, J) z_J with the rows J of G(:, N) taken from H
        Vector zN = s.cwiseProduct(x);
        Vector zJ(e);
        for (Index a = 0; a < e; ++a) {
          const Index j = pos[static_cast<std::size_t>(a)];
          zJ(a) = zN(j);
          zN(j) = 0.0;
        }
        Vector g = zN;
        g.noalias() -= Wt * (Wt.transpose() * zN);
        if (e > 0) {
          const Vector rowsJ = HJ.transpose() * zN;
          for (Index a = 0; a < e; ++a) g(pos[static_cast<std::size_t>(a)]) = rowsJ(a);
          g.noalias() += HJ * zJ;
        }
        y = s.cwiseProduct(g);
      },
      r);
}

double ResidualEngine::spectral_full(const Coordinates& c) const {
  check(c);
  return std::sqrt(top_eigenvalue(c, 0));
}

double ResidualEngine::spectral_deflated(const Coordinates& c, Index k) const {
  check(c);
  if (k >= sigma_.size()) return 0.0;
  return std::sqrt(top_eigenvalue(c, k));
}

ResidualEngine::Norms ResidualEngine::spectral(const Coordinates& c, Index k) const {
  return {spectral_full(c), spectral_deflated(c, k)};
}

ResidualEngine::Norms ResidualEngine::measure(const Coordinates& c, Index k, Norm norm) const {
  return norm == Norm::Spectral ? spectral(c, k) : frobenius(c, k);
}

}  // namespace sketchbound
