#include "sketchbound/sketch.hpp"

#include "sketchbound/errors.hpp"
#include "sketchbound/matrix_market.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace sketchbound {

GaussianSketch GaussianSketch::from_moments(DenseMatrix mean, DenseMatrix covariance,
                                            const Tolerances& tol) {
  if (covariance.rows() != covariance.cols())
    throw PreconditionError("gaussian sketch: covariance must be square");
  if (mean.rows() != covariance.rows()) {
    std::ostringstream msg;
    msg << "gaussian sketch: mean has " << mean.rows() << " rows, covariance is "
        << covariance.rows() << "x" << covariance.cols();
    throw PreconditionError(msg.str());
  }
  GaussianSketch out;
  const SymmetricEigen eig = symmetric_eigen(covariance, true);
  const double lambda_max = std::max(eig.values.maxCoeff(), 0.0);
  const double scale = std::max(lambda_max, std::abs(eig.values.minCoeff()));
  Vector root(eig.values.size());
  out.rank_r = 0;
  out.lambda_r = 0.0;
  for (Index i = 0; i < eig.values.size(); ++i) {
    const double lambda = eig.values(i);
    if (lambda < -tol.psd_tol * scale) {
      std::ostringstream msg;
      msg << "gaussian sketch: covariance is not PSD (eigenvalue " << lambda << ")";
      throw PreconditionError(msg.str());
    }
    root(i) = lambda > 0.0 ? std::sqrt(lambda) : 0.0;
    if (lambda_max > 0.0 && lambda > tol.eig_rank_tol * lambda_max) {
      if (out.rank_r == 0 || lambda < out.lambda_r) out.lambda_r = lambda;
      ++out.rank_r;
    }
  }
  DenseMatrix S = eig.vectors * root.asDiagonal() * eig.vectors.transpose();
  out.cov_sqrt = 0.5 * (S + S.transpose());
  out.mean = std::move(mean);
  out.covariance = 0.5 * (covariance + covariance.transpose());
  return out;
}

DenseMatrix standard_gaussian(Index n, Index p, SeededStream stream) {
  if (n < 1 || p < 1) throw PreconditionError("standard_gaussian: dimensions must be >= 1");
  NormalGenerator gen(stream);
  DenseMatrix G(n, p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i) G(i, j) = gen.next();
  return G;
}

DenseMatrix sample(const GaussianSketch& sketch, SeededStream stream) {
  const DenseMatrix G = standard_gaussian(sketch.rows(), sketch.cols(), stream);
  return sketch.mean + sketch.cov_sqrt * G;
}

DenseMatrix rsvd_sketch(const DenseMatrix& A, Index q, Index p, SeededStream stream) {
  if (q < 0) throw PreconditionError("rsvd_sketch: q must be >= 0");
  const DenseMatrix G = standard_gaussian(A.cols(), p, stream);
  DenseMatrix Z = A * G;
  for (Index i = 0; i < q; ++i) Z = A * (A.transpose() * Z);
  return Z;
}

GaussianSketch rsvd_distribution(const SvdFactors& svd, Index q, Index p) {
  if (q < 0) throw PreconditionError("rsvd_distribution: q must be >= 0");
  if (p < 1) throw PreconditionError("rsvd_distribution: p must be >= 1");
  const Index n = svd.rows();
  const Vector root = svd.sigma.array().pow(static_cast<double>(2 * q + 1));
  const Vector var = root.array().square();
  GaussianSketch out;
  out.mean = DenseMatrix::Zero(n, p);
  const DenseMatrix scaled_cov = svd.U * var.asDiagonal();
  out.covariance = scaled_cov * svd.U.transpose();
  out.covariance = (0.5 * (out.covariance + out.covariance.transpose())).eval();
  const DenseMatrix scaled_root = svd.U * root.asDiagonal();
  out.cov_sqrt = scaled_root * svd.U.transpose();
  out.cov_sqrt = (0.5 * (out.cov_sqrt + out.cov_sqrt.transpose())).eval();
  out.rank_r = svd.numerical_rank();
  out.lambda_r = out.rank_r > 0 ? var(out.rank_r - 1) : 0.0;
  return out;
}

SketchDescriptor read_sketch_descriptor(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sketch descriptor '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  SketchDescriptor desc;
  try {
    const auto base = path.parent_path();
    auto resolve = [&](const std::string& p) {
      std::filesystem::path fp(p);
      return fp.is_absolute() ? fp : base / fp;
    };
    desc.mean_path = resolve(j.at("mean_path").get<std::string>());
    desc.covariance_path = resolve(j.at("covariance_path").get<std::string>());
    desc.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return desc;
}

void write_sketch_descriptor(const std::filesystem::path& path, const SketchDescriptor& desc) {
  nlohmann::json j{{"mean_path", desc.mean_path.string()},
                   {"covariance_path", desc.covariance_path.string()},
                   {"seed", desc.seed}};
  write_text_atomically(path, j.dump(2) + "\n");
}

GaussianSketch load_sketch(const SketchDescriptor& desc) {
  return GaussianSketch::from_moments(read_matrix_market(desc.mean_path),
                                      read_matrix_market(desc.covariance_path));
}

}  // namespace sketchbound
