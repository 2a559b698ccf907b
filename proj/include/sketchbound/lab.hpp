#pragma once

#include "sketchbound/matcore.hpp"
#include "sketchbound/sketch.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sketchbound {

/// general:          ||(I - pi(Z)) A|| - ||(I - pi(Z)) Abar_k||
/// general_squared:  the same with squared norms
/// old:              ||(I - pi(Z)) A|| - ||Abar_k||
enum class Metric { General, GeneralSquared, Old };

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view text);

// Purposes fed to derive_seed.
inline constexpr std::uint64_t kSeedLeftFactor = 1;
inline constexpr std::uint64_t kSeedRightFactor = 2;
inline constexpr std::uint64_t kSeedTrials = 3;

struct SyntheticMatrix {
  DenseMatrix A;
  SvdFactors svd;
};

/// A = U Sigma V^T with U, V the Q factors of independent standard Gaussian
/// matrices and Sigma = diag(1 (ten times), 2^{-1/2}, 3^{-1/2}, ..., (l - 9)^{-1/2}),
/// l = min(n, m).
SyntheticMatrix synthetic_matrix(Index n, std::uint64_t seed, Index m = -1);
Vector synthetic_spectrum(Index length);

struct TrialRecord {
  Index trial_index = 0;
  Index k = 0, p = 0, q = 0;
  Norm norm = Norm::Frobenius;
  double metric_value = 0.0;
  double residual_full = 0.0;
  double residual_deflated = 0.0;
};

struct EmpiricalResult {
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1) estimator
  std::vector<TrialRecord> records;
  Index excluded = 0;  // trials whose sketch failed a rank check
};

/// Trial t uses SeededStream{derive_seed(seed, kSeedTrials), t}.
EmpiricalResult empirical_error(const DenseMatrix& A, const SvdFactors& svd,
                                const GaussianSketch& sketch, Index k, Index trials, Norm norm,
                                Metric metric, std::uint64_t seed);

/// Same for the RSVD sketch (A A^T)^q A G with p columns.
EmpiricalResult empirical_error_rsvd(const DenseMatrix& A, const SvdFactors& svd, Index q, Index k,
                                     Index p, Index trials, Norm norm, Metric metric,
                                     std::uint64_t seed);

struct SweepConfig {
  Index n = 1000;
  Index m = 1000;
  std::optional<std::filesystem::path> matrix_path;  // replaces the synthetic matrix
  std::vector<Index> k_list{5, 15};
  std::vector<Index> p_grid;        // absolute p values
  std::vector<Index> oversampling;  // p = k + value; used when p_grid is empty
  std::vector<Index> q_list{0, 1, 2};
  Index trials = 100;
  std::uint64_t seed = 0;
  std::vector<Norm> norm_list{Norm::Frobenius, Norm::Spectral};
  Metric metric = Metric::General;
  std::vector<std::string> bound_variants;
  std::filesystem::path output_path = "sweep.csv";
  std::string output_format = "csv";

  static SweepConfig from_json_text(const std::string& text);
  static SweepConfig from_file(const std::filesystem::path& path);
  std::string to_json_text() const;
  /// The (k, p) pairs of the grid, invalid ones included.
  std::vector<std::pair<Index, Index>> cells() const;
};

struct SweepRow {
  Index k = 0, p = 0, oversampling = 0, q = 0;
  Norm norm = Norm::Frobenius;
  Metric metric = Metric::General;
  double empirical_mean = 0.0;
  double empirical_std = 0.0;
  std::map<std::string, double> bounds;

  bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;            // sorted by (k, q, p, norm)
  std::vector<std::string> variants;     // column order
  std::vector<std::string> skipped;      // messages for invalid grid cells
  Index excluded = 0;
};

/// All variant names a sweep accepts.
const std::vector<std::string>& known_variants();

/// Bound value of a variant for one row, or nothing when the variant does not
/// apply to the row's norm or q. hmt_* values are on the old metric.
SweepResult run_sweep(const SweepConfig& config);
SweepResult run_sweep(const SweepConfig& config, const DenseMatrix& A, const SvdFactors& svd);

}  // namespace sketchbound
