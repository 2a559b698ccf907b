#pragma once

#include "sketchbound/matcore.hpp"
#include "sketchbound/random.hpp"

#include <filesystem>

namespace sketchbound {

/// Distribution Z ~ N(mean, covariance): the columns of Z are independent with
/// common covariance, so Z = mean + covariance^{1/2} G with G standard.
struct GaussianSketch {
  DenseMatrix mean;        // n x p
  DenseMatrix covariance;  // n x n, symmetric PSD
  DenseMatrix cov_sqrt;    // cached covariance^{1/2}
  Index rank_r = 0;        // numerical rank of covariance
  double lambda_r = 0.0;   // smallest retained eigenvalue

  Index rows() const { return covariance.rows(); }
  Index cols() const { return mean.cols(); }
  bool zero_mean() const { return mean.size() == 0 || mean.cwiseAbs().maxCoeff() == 0.0; }

  /// Validates covariance (symmetric, PSD within psd_tol) and caches its
  /// square root, rank and smallest nonzero eigenvalue.
  static GaussianSketch from_moments(DenseMatrix mean, DenseMatrix covariance,
                                     const Tolerances& tol = kDefaultTolerances);
};

/// n x p matrix of independent standard normals, filled column by column from
/// the stream.
DenseMatrix standard_gaussian(Index n, Index p, SeededStream stream);

/// mean + cov_sqrt * G with G = standard_gaussian(n, p, stream).
DenseMatrix sample(const GaussianSketch& sketch, SeededStream stream);

/// Z = (A A^T)^q A G with G = standard_gaussian(m, p, stream), evaluated as
/// alternating products with A and A^T.
DenseMatrix rsvd_sketch(const DenseMatrix& A, Index q, Index p, SeededStream stream);

/// The law of rsvd_sketch: N(0, U (Sigma Sigma^T)^{2q+1} U^T), assembled from
/// the factors. rank_r is the numerical rank of A.
GaussianSketch rsvd_distribution(const SvdFactors& svd, Index q, Index p);

/// JSON descriptor {"mean_path": ..., "covariance_path": ..., "seed": ...}
/// pointing at Matrix Market files. Relative paths resolve against the
/// descriptor's directory.
struct SketchDescriptor {
  std::filesystem::path mean_path;
  std::filesystem::path covariance_path;
  std::uint64_t seed = 0;
};

SketchDescriptor read_sketch_descriptor(const std::filesystem::path& path);
void write_sketch_descriptor(const std::filesystem::path& path, const SketchDescriptor& desc);
GaussianSketch load_sketch(const SketchDescriptor& desc);

}  // namespace sketchbound
