#include "sketchbound/emit.hpp"
#include "sketchbound/errors.hpp"
#include "sketchbound/expbounds.hpp"
#include "sketchbound/lab.hpp"
#include "sketchbound/residuals.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sketchbound;
using namespace testutil;

namespace {

// direct residuals with explicit projections
ResidualEngine::Norms dense_residual(const SvdFactors& f, const DenseMatrix& Q, Index k, Norm nm) {
  const DenseMatrix A = f.reconstruct();
  const DenseMatrix tail = f.Ubar_k(k) * f.SigmaBar_k(k) * f.Vbar_k(k).transpose();
  return {norm(A - project_onto(Q, A), nm), norm(tail - project_onto(Q, tail), nm)};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

SweepConfig small_config() {
  SweepConfig c;
  c.n = 60;
  c.m = 50;
  c.k_list = {3, 5};
  c.oversampling = {2, 6};
  c.q_list = {0, 1};
  c.trials = 5;
  c.seed = 17;
  c.bound_variants = known_variants();
  return c;
}

}  // namespace

TEST_CASE("synthetic spectrum and matrix") {
  const Vector s = synthetic_spectrum(1000);
  for (Index i = 0; i < 10; ++i) CHECK(s(i) == 1.0);
  CHECK(s(10) == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK(s(11) == doctest::Approx(0.5774).epsilon(1e-4));
  CHECK(s(999) == doctest::Approx(0.03177).epsilon(1e-3));
  CHECK(s(999) == doctest::Approx(1.0 / std::sqrt(991.0)));

  const SyntheticMatrix syn = synthetic_matrix(40, 3);
  CHECK((syn.svd.U.transpose() * syn.svd.U - DenseMatrix::Identity(40, 40)).norm() < 1e-12 * 40);
  CHECK((syn.svd.V.transpose() * syn.svd.V - DenseMatrix::Identity(40, 40)).norm() < 1e-12 * 40);
  CHECK((syn.svd.reconstruct() - syn.A).norm() < 1e-12);
  CHECK((syn.svd.sigma - synthetic_spectrum(40)).norm() == 0.0);
  CHECK((singular_values(syn.A) - syn.svd.sigma).norm() < 1e-12);
  CHECK((synthetic_matrix(40, 3).A - syn.A).norm() == 0.0);
  CHECK((synthetic_matrix(40, 4).A - syn.A).norm() > 1.0);

  const SyntheticMatrix rect = synthetic_matrix(30, 5, 20);
  CHECK(rect.A.rows() == 30);
  CHECK(rect.A.cols() == 20);
  CHECK(rect.svd.sigma.size() == 20);
}

TEST_CASE("metric names") {
  CHECK(parse_metric("general") == Metric::General);
  CHECK(parse_metric("old") == Metric::Old);
  CHECK(parse_metric("general_squared") == Metric::GeneralSquared);
  CHECK(to_string(Metric::Old) == "old");
  CHECK_THROWS_AS(parse_metric("new"), PreconditionError);
}

TEST_CASE("residual engine matches dense projections") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Index n = 25 + static_cast<Index>(seed % 7), m = 15 + static_cast<Index>(seed % 5);
    const Index p = 3 + static_cast<Index>(seed % 6), k = 1 + static_cast<Index>(seed % 3);
    const SvdFactors f = svd(gaussian(n, m, 100 + seed));
    const DenseMatrix Q = orthonormal_basis(gaussian(n, p, 200 + seed));
    const ResidualEngine dense(f);
    const ResidualEngine lanczos(f, 0);
    const auto W = dense.coordinates(Q);
    for (Norm nm : {Norm::Frobenius, Norm::Spectral}) {
      const auto want = dense_residual(f, Q, k, nm);
      const auto got = dense.measure(W, k, nm);
      CHECK(rel_err(got.full, want.full) < 1e-10);
      CHECK(rel_err(got.deflated, want.deflated) < 1e-10);
      const auto lz = lanczos.measure(W, k, nm);
      CHECK(rel_err(lz.full, want.full) < 1e-8);
      CHECK(rel_err(lz.deflated, want.deflated) < 1e-8);
    }
    CHECK(dense.tail_norm(k, Norm::Spectral) == doctest::Approx(f.sigma(k)));
    CHECK(dense.tail_norm(k, Norm::Frobenius) == doctest::Approx(f.sigma.tail(f.sigma.size() - k).norm()));
  }
}

TEST_CASE("residual engine keeps small residuals accurate") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Index n = 40, m = 30, k = 4, p = 7;
    const SvdFactors f = svd(gaussian(n, m, 300 + seed));
    DenseMatrix Z(n, p);
    Z.leftCols(k) = f.Uk(k) + 1e-9 * gaussian(n, k, 400 + seed);
    Z.rightCols(p - k) = gaussian(n, p - k, 500 + seed);
    const DenseMatrix Q = orthonormal_basis(Z);
    const auto c = ResidualEngine(f).coordinates(Q);
    CHECK(c.exact.size() >= static_cast<std::size_t>(k));
    // only the head matters: compare the residual of A_k against explicit projections
    SvdFactors head = f;
    head.sigma.tail(m - k).setZero();
    const ResidualEngine he(head), hl(head, 0);
    const auto hc = he.coordinates(Q);
    for (Norm nm : {Norm::Frobenius, Norm::Spectral}) {
      const auto want = dense_residual(head, Q, k, nm);
      CHECK(want.full > 1e-11);
      CHECK(rel_err(he.measure(hc, k, nm).full, want.full) < 1e-5);
      CHECK(rel_err(hl.measure(hc, k, nm).full, want.full) < 1e-5);
      CHECK(he.measure(hc, k, nm).deflated == 0.0);
    }
  }
}

TEST_CASE("empirical error") {
  SUBCASE("exact rank k is captured") {
    const DenseMatrix A = gaussian(30, 4, 1) * gaussian(4, 20, 2);
    const SvdFactors f = svd(A);
    for (Norm nm : {Norm::Frobenius, Norm::Spectral}) {
      const auto r = empirical_error_rsvd(A, f, 0, 4, 6, 10, nm, Metric::General, 3);
      CHECK(std::abs(r.mean) < 1e-10);
      const auto o = empirical_error_rsvd(A, f, 0, 4, 6, 10, nm, Metric::Old, 3);
      CHECK(std::abs(o.mean) < 1e-10);
    }
  }
  SUBCASE("general metric is nonnegative per trial") {
    const SvdFactors f = svd(gaussian(40, 30, 4));
    const DenseMatrix A = f.reconstruct();
    for (Metric mt : {Metric::General, Metric::GeneralSquared}) {
      const auto r = empirical_error_rsvd(A, f, 1, 3, 7, 50, Norm::Frobenius, mt, 5);
      CHECK(r.records.size() == 50);
      CHECK(r.excluded == 0);
      for (const auto& rec : r.records) {
        CHECK(rec.metric_value >= -1e-12);
        if (mt == Metric::General) CHECK(rec.metric_value == doctest::Approx(rec.residual_full - rec.residual_deflated));
      }
    }
  }
  SUBCASE("records, statistics and determinism") {
    const SvdFactors f = svd(gaussian(20, 15, 6));
    const DenseMatrix A = f.reconstruct();
    const auto a = empirical_error_rsvd(A, f, 0, 2, 5, 12, Norm::Spectral, Metric::Old, 7);
    const auto b = empirical_error_rsvd(A, f, 0, 2, 5, 12, Norm::Spectral, Metric::Old, 7);
    const auto c = empirical_error_rsvd(A, f, 0, 2, 5, 12, Norm::Spectral, Metric::Old, 8);
    CHECK(a.mean == b.mean);
    CHECK(a.std == b.std);
    CHECK(a.mean != c.mean);
    double s = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      CHECK(a.records[i].trial_index == static_cast<Index>(i));
      CHECK(a.records[i].metric_value == doctest::Approx(a.records[i].residual_full - f.sigma(2)));
      s += a.records[i].metric_value;
    }
    const double mean = s / 12.0;
    for (const auto& r : a.records) ss += (r.metric_value - mean) * (r.metric_value - mean);
    CHECK(a.mean == doctest::Approx(mean));
    CHECK(a.std == doctest::Approx(std::sqrt(ss / 11.0)));
  }
  SUBCASE("sample path agrees with the rsvd path") {
    const SvdFactors f = svd(gaussian(20, 15, 9));
    const DenseMatrix A = f.reconstruct();
    const GaussianSketch law = rsvd_distribution(f, 0, 5);
    const auto r = empirical_error(A, f, law, 2, 400, Norm::Frobenius, Metric::General, 10);
    const auto s = empirical_error_rsvd(A, f, 0, 2, 5, 400, Norm::Frobenius, Metric::General, 11);
    const double se = std::sqrt(r.std * r.std / 400 + s.std * s.std / 400);
    CHECK(std::abs(r.mean - s.mean) < 5 * se);
  }
  SUBCASE("test matrix, spectral bound dominates") {
    const SyntheticMatrix syn = synthetic_matrix(300, 12);
    const GaussianSketch law = rsvd_distribution(syn.svd, 0, 32);
    const double bound = theorem4_bound(syn.svd, law, 5, 32).bound;
    const auto r = empirical_error_rsvd(syn.A, syn.svd, 0, 5, 32, 100, Norm::Spectral, Metric::General, 13);
    CHECK(r.mean <= bound);
  }
  SUBCASE("argument errors") {
    const SvdFactors f = svd(gaussian(10, 8, 14));
    const DenseMatrix A = f.reconstruct();
    CHECK_THROWS_AS(empirical_error_rsvd(A, f, 0, 2, 5, 0, Norm::Spectral, Metric::Old, 1), PreconditionError);
    CHECK_THROWS_AS(empirical_error_rsvd(A, f, 0, 6, 5, 3, Norm::Spectral, Metric::Old, 1), PreconditionError);
  }
}

TEST_CASE("sweep config parsing") {
  const SweepConfig c = SweepConfig::from_json_text(R"({"n": 50, "k_list": [2], "p_grid": [4, 6], "trials": 3})");
  CHECK(c.n == 50);
  CHECK(c.m == 50);
  CHECK(c.cells() == std::vector<std::pair<Index, Index>>{{2, 4}, {2, 6}});
  CHECK(c.bound_variants == known_variants());

  const SweepConfig back = SweepConfig::from_json_text(c.to_json_text());
  CHECK(back.to_json_text() == c.to_json_text());

  const SweepConfig o = SweepConfig::from_json_text(R"({"k_list": [5, 15], "oversampling": [2, 12]})");
  CHECK(o.cells() == std::vector<std::pair<Index, Index>>{{5, 7}, {5, 17}, {15, 17}, {15, 27}});

  CHECK_THROWS_AS(SweepConfig::from_json_text("{"), IoError);
  CHECK_THROWS_AS(SweepConfig::from_json_text(R"({"k_list": [2]})"), PreconditionError);
  CHECK_THROWS_AS(SweepConfig::from_json_text(R"({"p_grid": [4], "oversampling": [2]})"), PreconditionError);
  CHECK_THROWS_AS(SweepConfig::from_json_text(R"({"p_grid": [4], "trials": 0})"), PreconditionError);
  CHECK_THROWS_AS(SweepConfig::from_json_text(R"({"p_grid": [4], "bound_variants": ["bt"]})"), PreconditionError);
  CHECK_THROWS_AS(SweepConfig::from_json_text(R"({"p_grid": [4], "output_format": "xml"})"), PreconditionError);
  CHECK_THROWS_AS(SweepConfig::from_json_text(R"({"p_grid": [4], "norm_list": ["nuclear"]})"), PreconditionError);
  CHECK_THROWS_AS(SweepConfig::from_json_text(R"({"p_grid": "4"})"), PreconditionError);
  CHECK_THROWS_AS(SweepConfig::from_file("/nonexistent/sweep.json"), IoError);
}

TEST_CASE("single cell sweep") {
  SweepConfig c;
  c.n = 40;
  c.m = 40;
  c.k_list = {3};
  c.p_grid = {8};
  c.q_list = {0};
  c.trials = 1;
  c.bound_variants = known_variants();
  const SweepResult r = run_sweep(c);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.excluded == 0);
  const SweepRow& fro = r.rows[0];
  const SweepRow& spec = r.rows[1];
  CHECK(fro.norm == Norm::Frobenius);
  CHECK(spec.norm == Norm::Spectral);
  CHECK(fro.oversampling == 5);
  CHECK(fro.empirical_std == 0.0);
  for (const char* v : {"thm3", "thm3_squared", "thm3_old", "cor_frobenius", "hmt_frobenius"})
    CHECK(fro.bounds.count(v) == 1);
  for (const char* v : {"thm4", "thm5", "cor_spectral", "cor_spectral_improved", "hmt_spectral", "hmt_power"})
    CHECK(spec.bounds.count(v) == 1);
  CHECK(fro.bounds.size() == 5);
  CHECK(fro.bounds.at("thm3_old") <= fro.bounds.at("thm3"));
  CHECK(fro.bounds.at("thm3_old") <= fro.bounds.at("hmt_frobenius") * (1 + 1e-12));
  CHECK(spec.bounds.size() == 6);
  CHECK(rel_err(fro.bounds.at("thm3"), fro.bounds.at("cor_frobenius")) < 1e-10);
  CHECK(rel_err(spec.bounds.at("thm4"), spec.bounds.at("cor_spectral")) < 1e-10);
  CHECK(rel_err(spec.bounds.at("thm5"), spec.bounds.at("cor_spectral_improved")) < 1e-10);
  CHECK(spec.bounds.at("hmt_spectral") == spec.bounds.at("hmt_power"));

  const SyntheticMatrix syn = synthetic_matrix(40, 0);
  const auto e = empirical_error_rsvd(syn.A, syn.svd, 0, 3, 8, 1, Norm::Spectral, Metric::General, 0);
  CHECK(spec.empirical_mean == doctest::Approx(e.mean).epsilon(1e-10));
}

TEST_CASE("sweep grid, ordering and invariants") {
  SweepConfig c = small_config();
  c.oversampling = {2, 6, 60};
  const SweepResult r = run_sweep(c);
  CHECK(r.skipped.size() == 2);
  CHECK(r.rows.size() == 2 * 2 * 2 * 2);
  CHECK(r.excluded == 0);
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    const auto& a = r.rows[i - 1];
    const auto& b = r.rows[i];
    // norm_list order is frobenius, spectral
    CHECK(std::make_tuple(a.k, a.q, a.p, a.norm == Norm::Spectral) <
          std::make_tuple(b.k, b.q, b.p, b.norm == Norm::Spectral));
  }
  for (const auto& row : r.rows) {
    CHECK(row.empirical_std >= 0.0);
    for (const auto& [name, v] : row.bounds)
      if (name.rfind("hmt", 0) != 0) CHECK(v >= 0.0);
    if (row.q != 0) CHECK(row.bounds.count("hmt_frobenius") + row.bounds.count("hmt_spectral") == 0);
    if (row.norm == Norm::Spectral) CHECK(row.bounds.at("thm5") <= row.bounds.at("thm4") * (1 + 1e-12));
    const char* main = row.norm == Norm::Frobenius ? "thm3" : "thm4";
    CHECK(row.empirical_mean - 3 * row.empirical_std / std::sqrt(5.0) <= row.bounds.at(main));
  }
}

TEST_CASE("sweep with the old metric keeps every row finite") {
  SweepConfig c = small_config();
  c.metric = Metric::Old;
  c.bound_variants = {"cor_frobenius", "hmt_frobenius", "hmt_power"};
  const SweepResult r = run_sweep(c);
  CHECK(r.variants == c.bound_variants);
  for (const auto& row : r.rows) {
    CHECK(row.metric == Metric::Old);
    CHECK(std::isfinite(row.empirical_mean));
    for (const auto& [name, v] : row.bounds) CHECK(std::isfinite(v));
  }
}

TEST_CASE("sweep determinism and emission round trips") {
  const SweepConfig c = small_config();
  const SweepResult a = run_sweep(c);
  const SweepResult b = run_sweep(c);
  CHECK(a.rows == b.rows);
  SweepConfig other = c;
  other.seed = 18;
  CHECK_FALSE(run_sweep(other).rows == a.rows);

  const std::string csv = rows_to_csv(a.rows, a.variants);
  CHECK(csv == rows_to_csv(b.rows, b.variants));
  std::vector<std::string> variants;
  const auto parsed = rows_from_csv(csv, &variants);
  CHECK(variants == a.variants);
  CHECK(parsed == a.rows);
  CHECK(rows_to_csv(parsed, variants) == csv);
  CHECK(csv.rfind("k,p,oversampling,q,norm,metric,empirical_mean,empirical_std,", 0) == 0);

  const auto from_json = rows_from_json(rows_to_json(a.rows));
  CHECK(from_json == a.rows);

  const auto dir = std::filesystem::temp_directory_path() / "sketchbound_lab_test";
  std::filesystem::create_directories(dir);
  emit(a.rows, a.variants, "csv", dir / "out.csv");
  CHECK(read_file(dir / "out.csv") == csv);
  emit(a.rows, a.variants, "json", dir / "out.json");
  CHECK(rows_from_json(read_file(dir / "out.json")) == a.rows);
  CHECK_THROWS_AS(emit(a.rows, a.variants, "xml", dir / "out.xml"), PreconditionError);
  CHECK_THROWS_AS(emit(a.rows, a.variants, "csv", "/nonexistent/dir/out.csv"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("one row emits one header and one data line") {
  SweepRow row;
  row.k = 2;
  row.p = 5;
  row.oversampling = 3;
  row.empirical_mean = 0.1;
  row.bounds["thm3"] = 1.0 / 3.0;
  const std::string csv = rows_to_csv({row}, {"thm3", "thm4"});
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  const auto back = rows_from_csv(csv);
  REQUIRE(back.size() == 1);
  CHECK(back[0] == row);
  CHECK(back[0].bounds.at("thm3") == 1.0 / 3.0);
  CHECK(back[0].bounds.count("thm4") == 0);

  SweepRow odd = row;
  odd.empirical_mean = std::numeric_limits<double>::quiet_NaN();
  odd.bounds["thm3"] = std::numeric_limits<double>::infinity();
  const auto back2 = rows_from_csv(rows_to_csv({odd}, {"thm3"}));
  CHECK(std::isnan(back2[0].empirical_mean));
  CHECK(back2[0].bounds.at("thm3") == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(rows_from_csv("k,p\n1\n"), IoError);
}
