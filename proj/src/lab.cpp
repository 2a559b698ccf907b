#include "sketchbound/lab.hpp"

#include "sketchbound/errors.hpp"
#include "sketchbound/expbounds.hpp"
#include "sketchbound/matrix_market.hpp"
#include "sketchbound/random.hpp"
#include "sketchbound/residuals.hpp"
#include "sketchbound/rsvdbounds.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sketchbound {

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::General: return "general";
    case Metric::GeneralSquared: return "general_squared";
    case Metric::Old: return "old";
  }
  return "?";
}

Metric parse_metric(std::string_view text) {
  if (text == "general") return Metric::General;
  if (text == "general_squared") return Metric::GeneralSquared;
  if (text == "old") return Metric::Old;
  throw PreconditionError("unknown metric '" + std::string(text) + "'");
}

Vector synthetic_spectrum(Index length) {
  if (length < 11) throw PreconditionError("synthetic spectrum needs at least 11 singular values");
  Vector s(length);
  for (Index i = 0; i < 10; ++i) s(i) = 1.0;
  for (Index j = 2; j <= length - 9; ++j) s(j + 8) = 1.0 / std::sqrt(static_cast<double>(j));
  return s;
}

SyntheticMatrix synthetic_matrix(Index n, std::uint64_t seed, Index m) {
  if (m < 0) m = n;
  if (n < 11 || m < 11) throw PreconditionError("synthetic_matrix: n and m must be >= 11");
  const Index l = std::min(n, m);
  auto orthogonal = [](Index size, std::uint64_t stream_seed) {
    const DenseMatrix G = standard_gaussian(size, size, SeededStream{stream_seed, 0});
    Eigen::HouseholderQR<DenseMatrix> qr(G);
    return DenseMatrix(qr.householderQ());
  };
  const DenseMatrix Ufull = orthogonal(n, derive_seed(seed, kSeedLeftFactor));
  const DenseMatrix Vfull = orthogonal(m, derive_seed(seed, kSeedRightFactor));

  SyntheticMatrix out;
  out.svd.sigma = synthetic_spectrum(l);
  out.svd.U = n >= m ? DenseMatrix(Ufull.leftCols(l)) : Ufull;
  out.svd.V = n >= m ? Vfull : DenseMatrix(Vfull.leftCols(l));
  out.A = out.svd.U.leftCols(l) * out.svd.sigma.asDiagonal() * out.svd.V.leftCols(l).transpose();
  return out;
}

namespace {

// Residual measurements for one sketch draw. The sketch may carry more columns
// than a cell needs: cell (k, p) uses the leading p columns, whose span is the
// span of the leading p columns of the Householder Q.
class DrawMeasurer {
public:
  DrawMeasurer(const SvdFactors& svd, const ResidualEngine& engine) : svd_(svd), engine_(engine) {}

  void load(const DenseMatrix& Z, const DenseMatrix& centered, Index kmax) {
    Z_ = &Z;
    qr_.compute(Z);
    const Index n = Z.rows(), p = Z.cols();
    Q_ = qr_.householderQ() * DenseMatrix::Identity(n, p);
    W_ = engine_.left_factor().transpose() * Q_;
    Omega_ = svd_.Uk(kmax).transpose() * centered;
    full_spectral_.clear();
    coords_.clear();
  }

  bool valid(Index k, Index p) const {
    const Vector so = singular_values(Omega_.topLeftCorner(k, p));
    return so(k - 1) > kDefaultTolerances.rank_tol * so(0);
  }

  ResidualEngine::Norms norms(Index k, Index p, Norm norm) {
    const ResidualEngine::Coordinates& c = coordinates(p);
    if (norm == Norm::Frobenius) return engine_.frobenius(c, k);
    ResidualEngine::Norms out;
    auto it = full_spectral_.find(p);
    if (it == full_spectral_.end()) it = full_spectral_.emplace(p, engine_.spectral_full(c)).first;
    out.full = it->second;
    out.deflated = engine_.spectral_deflated(c, k);
    return out;
  }

private:
  // Coordinates of an orthonormal basis of range(Z[:, :p]). When those columns
  // are rank deficient the Householder columns overshoot the range, so the
  // basis comes from the left singular vectors instead.
  const ResidualEngine::Coordinates& coordinates(Index p) {
    auto it = coords_.find(p);
    if (it != coords_.end()) return it->second;
    const Vector sr = singular_values(qr_.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>());
    if (sr(p - 1) > kDefaultTolerances.rank_tol * sr(0))
      return coords_.emplace(p, engine_.coordinates(Q_.leftCols(p), W_.leftCols(p))).first->second;
    Eigen::JacobiSVD<DenseMatrix> dec(Z_->leftCols(p), Eigen::ComputeThinU);
    const Vector& s = dec.singularValues();
    Index r = 0;
    while (r < s.size() && s(r) > kDefaultTolerances.rank_tol * s(0)) ++r;
    return coords_.emplace(p, engine_.coordinates(dec.matrixU().leftCols(r))).first->second;
  }

  const SvdFactors& svd_;
  const ResidualEngine& engine_;
  const DenseMatrix* Z_ = nullptr;
  Eigen::HouseholderQR<DenseMatrix> qr_;
  DenseMatrix Q_;
  DenseMatrix W_;
  DenseMatrix Omega_;
  std::map<Index, double> full_spectral_;
  std::map<Index, ResidualEngine::Coordinates> coords_;
};

TrialRecord make_record(const ResidualEngine& engine, const ResidualEngine::Norms& r, Index trial,
                        Index k, Index p, Index q, Norm norm, Metric metric) {
  TrialRecord rec;
  rec.trial_index = trial;
  rec.k = k;
  rec.p = p;
  rec.q = q;
  rec.norm = norm;
  switch (metric) {
    case Metric::General:
      rec.residual_full = r.full;
      rec.residual_deflated = r.deflated;
      break;
    case Metric::GeneralSquared:
      rec.residual_full = r.full * r.full;
      rec.residual_deflated = r.deflated * r.deflated;
      break;
    case Metric::Old:
      rec.residual_full = r.full;
      rec.residual_deflated = engine.tail_norm(k, norm);
      break;
  }
  rec.metric_value = rec.residual_full - rec.residual_deflated;
  return rec;
}

void summarize(EmpiricalResult& res) {
  const auto n = static_cast<double>(res.records.size());
  if (res.records.empty()) {
    res.mean = std::nan("");
    res.std = std::nan("");
    return;
  }
  double sum = 0.0;
  for (const auto& r : res.records) sum += r.metric_value;
  res.mean = sum / n;
  double ss = 0.0;
  for (const auto& r : res.records) ss += (r.metric_value - res.mean) * (r.metric_value - res.mean);
  res.std = res.records.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

void check_cell(const SvdFactors& svd, Index k, Index p, Index trials) {
  if (trials < 1) throw PreconditionError("trials must be >= 1");
  if (k < 1 || p < k) {
    std::ostringstream msg;
    msg << "need 1 <= k <= p (k = " << k << ", p = " << p << ")";
    throw PreconditionError(msg.str());
  }
  if (p > svd.rows()) throw PreconditionError("p exceeds the row count of A");
}

template <class Draw>
EmpiricalResult run_trials(const SvdFactors& svd, Index q, Index k, Index p, Index trials, Norm norm,
                           Metric metric, std::uint64_t seed, Draw&& draw) {
  const ResidualEngine engine(svd);
  DrawMeasurer meas(svd, engine);
  EmpiricalResult res;
  const std::uint64_t trial_seed = derive_seed(seed, kSeedTrials);
  for (Index t = 0; t < trials; ++t) {
    DenseMatrix Z, centered;
    draw(SeededStream{trial_seed, static_cast<std::uint64_t>(t)}, Z, centered);
    meas.load(Z, centered, k);
    if (!meas.valid(k, p)) {
      ++res.excluded;
      continue;
    }
    res.records.push_back(make_record(engine, meas.norms(k, p, norm), t, k, p, q, norm, metric));
  }
  summarize(res);
  return res;
}

}  // namespace

EmpiricalResult empirical_error(const DenseMatrix& A, const SvdFactors& svd,
                                const GaussianSketch& sketch, Index k, Index trials, Norm norm,
                                Metric metric, std::uint64_t seed) {
  if (A.rows() != svd.rows() || sketch.rows() != A.rows())
    throw PreconditionError("empirical_error: sketch, matrix and factors disagree in row count");
  const Index p = sketch.cols();
  check_cell(svd, k, p, trials);
  return run_trials(svd, 0, k, p, trials, norm, metric, seed,
                    [&](SeededStream stream, DenseMatrix& Z, DenseMatrix& centered) {
                      centered = sketch.cov_sqrt * standard_gaussian(sketch.rows(), p, stream);
                      Z = sketch.mean + centered;
                    });
}

EmpiricalResult empirical_error_rsvd(const DenseMatrix& A, const SvdFactors& svd, Index q, Index k,
                                     Index p, Index trials, Norm norm, Metric metric,
                                     std::uint64_t seed) {
  if (A.rows() != svd.rows()) throw PreconditionError("empirical_error: matrix and factors disagree");
  check_cell(svd, k, p, trials);
  return run_trials(svd, q, k, p, trials, norm, metric, seed,
                    [&](SeededStream stream, DenseMatrix& Z, DenseMatrix& centered) {
                      Z = rsvd_sketch(A, q, p, stream);
                      centered = Z;
                    });
}

// ---------------------------------------------------------------------------
// Sweep configuration

namespace {

using nlohmann::json;

template <class T>
std::vector<T> read_list(const json& j, const char* key, std::vector<T> fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<std::vector<T>>();
}

}  // namespace

const std::vector<std::string>& known_variants() {
  static const std::vector<std::string> names{
      "thm3",          "thm3_squared", "thm3_old",     "thm4",
      "thm5",          "cor_frobenius", "cor_spectral", "cor_spectral_improved",
      "hmt_frobenius", "hmt_spectral",  "hmt_power"};
  return names;
}

SweepConfig SweepConfig::from_json_text(const std::string& text) {
  SweepConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("sweep config: ") + e.what());
  }
  try {
    c.n = j.value("n", c.n);
    c.m = j.value("m", c.n);
    if (j.contains("matrix_path")) c.matrix_path = j.at("matrix_path").get<std::string>();
    c.k_list = read_list<Index>(j, "k_list", c.k_list);
    c.p_grid = read_list<Index>(j, "p_grid", {});
    c.oversampling = read_list<Index>(j, "oversampling", {});
    c.q_list = read_list<Index>(j, "q_list", c.q_list);
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    if (j.contains("norm_list")) {
      c.norm_list.clear();
      for (const auto& s : j.at("norm_list")) c.norm_list.push_back(parse_norm(s.get<std::string>()));
    }
    if (j.contains("metric")) c.metric = parse_metric(j.at("metric").get<std::string>());
    c.bound_variants = read_list<std::string>(j, "bound_variants", known_variants());
    c.output_path = j.value("output_path", c.output_path.string());
    c.output_format = j.value("output_format", c.output_format);
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("sweep config: ") + e.what());
  }

  if (c.p_grid.empty() == c.oversampling.empty())
    throw PreconditionError("sweep config: give exactly one of p_grid and oversampling");
  if (c.trials < 1) throw PreconditionError("sweep config: trials must be >= 1");
  if (c.k_list.empty() || c.q_list.empty() || c.norm_list.empty())
    throw PreconditionError("sweep config: k_list, q_list and norm_list must be non-empty");
  for (Index q : c.q_list)
    if (q < 0) throw PreconditionError("sweep config: q must be >= 0");
  const auto& known = known_variants();
  for (const auto& v : c.bound_variants)
    if (std::find(known.begin(), known.end(), v) == known.end())
      throw PreconditionError("sweep config: unknown bound variant '" + v + "'");
  if (c.output_format != "csv" && c.output_format != "json")
    throw PreconditionError("sweep config: output_format must be csv or json");
  return c;
}

SweepConfig SweepConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sweep config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string SweepConfig::to_json_text() const {
  json j;
  j["n"] = n;
  j["m"] = m;
  if (matrix_path) j["matrix_path"] = matrix_path->string();
  j["k_list"] = k_list;
  if (!p_grid.empty()) j["p_grid"] = p_grid;
  if (!oversampling.empty()) j["oversampling"] = oversampling;
  j["q_list"] = q_list;
  j["trials"] = trials;
  j["seed"] = seed;
  std::vector<std::string> norms;
  for (Norm nm : norm_list) norms.emplace_back(to_string(nm));
  j["norm_list"] = norms;
  j["metric"] = std::string(to_string(metric));
  j["bound_variants"] = bound_variants;
  j["output_path"] = output_path.string();
  j["output_format"] = output_format;
  return j.dump(2);
}

std::vector<std::pair<Index, Index>> SweepConfig::cells() const {
  std::vector<std::pair<Index, Index>> out;
  for (Index k : k_list) {
    if (!p_grid.empty())
      for (Index p : p_grid) out.emplace_back(k, p);
    else
      for (Index o : oversampling) out.emplace_back(k, k + o);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Sweep

namespace {

bool variant_norm_matches(const std::string& v, Norm norm) {
  static const std::set<std::string> frob{"thm3", "thm3_squared", "thm3_old", "cor_frobenius", "hmt_frobenius"};
  return frob.count(v) ? norm == Norm::Frobenius : norm == Norm::Spectral;
}

bool is_theorem(const std::string& v) { return v.rfind("thm", 0) == 0; }

class BoundTable {
public:
  BoundTable(const SvdFactors& svd, Index max_p) : svd_(svd), max_p_(max_p) {}

  std::optional<double> value(const std::string& v, Index k, Index p, Index q) {
    if (v == "thm3") return theorem3_bound(svd_, projected(k, q), 0.0, p).bound;
    if (v == "thm3_squared") return theorem3_squared_bound(svd_, projected(k, q), p).bound;
    if (v == "thm3_old") return theorem3_old_bound(svd_, projected(k, q), p).bound;
    if (v == "thm4") return theorem4_bound(svd_, projected(k, q), 0.0, p).bound;
    if (v == "thm5") return theorem5_bound(svd_, projected(k, q), 0.0, p).bound;
    const SpectrumProfile prof = SpectrumProfile::make(svd_.sigma, k, p, q, max_p_);
    if (v == "cor_frobenius") return cor_frobenius(prof).bound;
    if (v == "cor_spectral") return cor_spectral(prof).bound;
    if (v == "cor_spectral_improved") return cor_spectral_improved(prof).bound;
    const double tail_f = k < svd_.size() ? svd_.sigma.tail(svd_.size() - k).norm() : 0.0;
    const double next = svd_.sigma_after(k);
    if (v == "hmt_frobenius") {
      if (q != 0) return std::nullopt;
      return hmt_frobenius(prof.sigma, k, p) - tail_f;
    }
    if (v == "hmt_spectral") {
      if (q != 0) return std::nullopt;
      return hmt_spectral(prof.sigma, k, p) - next;
    }
    if (v == "hmt_power") return hmt_power(prof.sigma, k, p, q) - next;
    throw PreconditionError("unknown bound variant '" + v + "'");
  }

private:
  const ProjectedCovariance& projected(Index k, Index q) {
    const auto key = std::make_pair(k, q);
    auto it = pcs_.find(key);
    if (it != pcs_.end()) return it->second;
    auto cov = covs_.find(q);
    if (cov == covs_.end()) {
      const Vector var = svd_.sigma.array().pow(static_cast<double>(4 * q + 2));
      const DenseMatrix Uv = svd_.U * var.asDiagonal();
      DenseMatrix C = Uv * svd_.U.transpose();
      cov = covs_.emplace(q, 0.5 * (C + C.transpose())).first;
    }
    return pcs_.emplace(key, project_covariance(cov->second, svd_, k, false)).first->second;
  }

  const SvdFactors& svd_;
  Index max_p_;
  std::map<Index, DenseMatrix> covs_;
  std::map<std::pair<Index, Index>, ProjectedCovariance> pcs_;
};

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
  if (config.matrix_path) {
    const DenseMatrix A = read_matrix_market(*config.matrix_path);
    return run_sweep(config, A, svd(A));
  }
  const SyntheticMatrix syn = synthetic_matrix(config.n, config.seed, config.m);
  return run_sweep(config, syn.A, syn.svd);
}

SweepResult run_sweep(const SweepConfig& config, const DenseMatrix& A, const SvdFactors& factors) {
  SweepResult result;
  result.variants = config.bound_variants;
  const Index max_p = std::min(A.rows(), A.cols());
  const Index rank = factors.numerical_rank();

  std::vector<std::pair<Index, Index>> cells;
  for (const auto& [k, p] : config.cells()) {
    std::ostringstream why;
    if (k < 1 || p < k + 2) why << "requires 1 <= k <= p - 2";
    else if (p > max_p) why << "p exceeds min(n, m) = " << max_p;
    if (!why.str().empty()) {
      std::ostringstream msg;
      msg << "skipping k = " << k << ", p = " << p << ": " << why.str();
      result.skipped.push_back(msg.str());
      continue;
    }
    cells.emplace_back(k, p);
  }
  if (cells.empty()) throw PreconditionError("sweep: no valid (k, p) cell in the grid");

  Index kmax = 0, pmax = 0;
  for (const auto& [k, p] : cells) {
    kmax = std::max(kmax, k);
    pmax = std::max(pmax, p);
  }

  const ResidualEngine engine(factors);
  BoundTable table(factors, max_p);
  const std::uint64_t trial_seed = derive_seed(config.seed, kSeedTrials);
  const Index nn = static_cast<Index>(config.norm_list.size());

  std::vector<std::pair<Index, SweepRow>> staged;  // (q order, row)
  for (Index q : config.q_list) {
    // values[cell][norm] over the valid trials
    std::vector<std::vector<std::vector<double>>> values(
        cells.size(), std::vector<std::vector<double>>(static_cast<std::size_t>(nn)));
    DrawMeasurer meas(factors, engine);
    for (Index t = 0; t < config.trials; ++t) {
      const DenseMatrix Z = rsvd_sketch(A, q, pmax, SeededStream{trial_seed, static_cast<std::uint64_t>(t)});
      meas.load(Z, Z, kmax);
      for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto [k, p] = cells[c];
        if (!meas.valid(k, p)) {
          ++result.excluded;
          continue;
        }
        for (Index ni = 0; ni < nn; ++ni) {
          const Norm norm = config.norm_list[static_cast<std::size_t>(ni)];
          const TrialRecord rec = make_record(engine, meas.norms(k, p, norm), t, k, p, q, norm, config.metric);
          values[c][static_cast<std::size_t>(ni)].push_back(rec.metric_value);
        }
      }
    }

    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto [k, p] = cells[c];
      for (Index ni = 0; ni < nn; ++ni) {
        const Norm norm = config.norm_list[static_cast<std::size_t>(ni)];
        EmpiricalResult stats;
        for (double v : values[c][static_cast<std::size_t>(ni)]) {
          TrialRecord r;
          r.metric_value = v;
          stats.records.push_back(r);
        }
        summarize(stats);
        SweepRow row;
        row.k = k;
        row.p = p;
        row.oversampling = p - k;
        row.q = q;
        row.norm = norm;
        row.metric = config.metric;
        row.empirical_mean = stats.mean;
        row.empirical_std = stats.std;
        for (const auto& v : config.bound_variants) {
          if (!variant_norm_matches(v, norm)) continue;
          if (is_theorem(v) && p > rank) continue;
          if (auto b = table.value(v, k, p, q)) row.bounds.emplace(v, *b);
        }
        staged.emplace_back(ni, std::move(row));
      }
    }
  }

  std::stable_sort(staged.begin(), staged.end(), [](const auto& a, const auto& b) {
    const SweepRow& x = a.second;
    const SweepRow& y = b.second;
    if (x.k != y.k) return x.k < y.k;
    if (x.q != y.q) return x.q < y.q;
    if (x.p != y.p) return x.p < y.p;
    return a.first < b.first;
  });
  for (auto& s : staged) result.rows.push_back(std::move(s.second));
  return result;
}

}  // namespace sketchbound
