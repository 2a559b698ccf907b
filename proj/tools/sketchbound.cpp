// sketchbound: synthetic matrices, bound reports, Monte Carlo errors and sweeps.

#include "sketchbound/emit.hpp"
#include "sketchbound/errors.hpp"
#include "sketchbound/expbounds.hpp"
#include "sketchbound/lab.hpp"
#include "sketchbound/matrix_market.hpp"
#include "sketchbound/report_json.hpp"
#include "sketchbound/rsvdbounds.hpp"
#include "sketchbound/sketch.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace sketchbound;

namespace {

struct MatrixSource {
  std::string matrix_path;
  Index synthetic_n = 0;
  std::uint64_t seed = 0;
};

void add_matrix_options(CLI::App* cmd, MatrixSource& src) {
  auto* m = cmd->add_option("--matrix", src.matrix_path, "Matrix Market file");
  auto* s = cmd->add_option("--synthetic-n", src.synthetic_n, "size of the synthetic test matrix");
  m->excludes(s);
}

SyntheticMatrix load_matrix(const MatrixSource& src) {
  if (!src.matrix_path.empty()) {
    SyntheticMatrix out;
    out.A = read_matrix_market(src.matrix_path);
    out.svd = svd(out.A);
    return out;
  }
  if (src.synthetic_n <= 0) throw PreconditionError("give --matrix or --synthetic-n");
  return synthetic_matrix(src.synthetic_n, src.seed);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text_atomically(path, text);
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::size_t start = 0;
    while (start <= item.size()) {
      const auto comma = item.find(',', start);
      const auto piece = item.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!piece.empty()) out.push_back(piece);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return out;
}

Json bound_report(const SyntheticMatrix& mat, const std::optional<GaussianSketch>& custom,
                  const std::string& variant, Index k, Index p, Index q) {
  const SvdFactors& f = mat.svd;
  if (variant.rfind("thm", 0) == 0) {
    const GaussianSketch sketch = custom ? *custom : rsvd_distribution(f, q, p);
    if (variant == "thm3") return to_json(theorem3_bound(f, sketch, k, p));
    if (variant == "thm3_squared") return to_json(theorem3_squared_bound(f, sketch, k, p));
    if (variant == "thm3_old") return to_json(theorem3_old_bound(f, sketch, k, p));
    if (variant == "thm4") return to_json(theorem4_bound(f, sketch, k, p));
    if (variant == "thm5") return to_json(theorem5_bound(f, sketch, k, p));
  }
  const SpectrumProfile prof = SpectrumProfile::make(f.sigma, k, p, q, std::min(f.rows(), f.cols()));
  if (variant == "cor_frobenius") return to_json(cor_frobenius(prof));
  if (variant == "cor_spectral") return to_json(cor_spectral(prof));
  if (variant == "cor_spectral_improved") return to_json(cor_spectral_improved(prof));
  Json j;
  j["variant"] = variant;
  j["k"] = k;
  j["p"] = p;
  j["q"] = q;
  if (variant == "hmt_frobenius") j["bound"] = hmt_frobenius(prof.sigma, k, p);
  else if (variant == "hmt_spectral") j["bound"] = hmt_spectral(prof.sigma, k, p);
  else if (variant == "hmt_power") j["bound"] = hmt_power(prof.sigma, k, p, q);
  else throw PreconditionError("unknown variant '" + variant + "'");
  j["tail_norm"] = variant == "hmt_frobenius" ? f.sigma.tail(f.size() - k).norm() : f.sigma_after(k);
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized low-rank approximation error bounds"};
  app.require_subcommand(1);

  // gen-matrix
  Index gen_n = 1000;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-matrix", "write the synthetic test matrix");
  gen->add_option("--n", gen_n, "matrix size")->required();
  gen->add_option("--seed", gen_seed, "seed")->required();
  gen->add_option("--out", gen_out, "output Matrix Market path")->required();

  // bounds
  MatrixSource bsrc;
  Index bk = 0, bp = 0, bq = 0;
  std::vector<std::string> bvariants;
  std::string bmean, bcov, bout;
  auto* bounds = app.add_subcommand("bounds", "evaluate bounds as a JSON report");
  add_matrix_options(bounds, bsrc);
  bounds->add_option("--seed", bsrc.seed, "seed of the synthetic matrix");
  bounds->add_option("--k", bk, "target rank")->required();
  bounds->add_option("--p", bp, "sketch size")->required();
  bounds->add_option("--q", bq, "power iterations");
  bounds->add_option("--variant", bvariants, "variant names (comma separated)")->required();
  bounds->add_option("--mean", bmean, "sketch mean (Matrix Market)");
  bounds->add_option("--cov", bcov, "sketch covariance (Matrix Market)");
  bounds->add_option("--out", bout, "output path (default stdout)");

  // sweep
  std::string sweep_config, sweep_out, sweep_format;
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("--config", sweep_config, "sweep configuration (JSON)")->required();
  sweep->add_option("--out", sweep_out, "override output_path");
  sweep->add_option("--format", sweep_format, "override output_format")->check(CLI::IsMember({"csv", "json"}));

  // empirical
  MatrixSource esrc;
  Index ek = 0, ep = 0, eq = 0, etrials = 100;
  std::string enorm = "frobenius", emetric = "general", esketch, eout;
  bool erecords = false;
  auto* emp = app.add_subcommand("empirical", "Monte Carlo error statistics");
  add_matrix_options(emp, esrc);
  emp->add_option("--k", ek, "target rank")->required();
  emp->add_option("--p", ep, "sketch size");
  emp->add_option("--q", eq, "power iterations");
  emp->add_option("--trials", etrials, "number of trials");
  emp->add_option("--seed", esrc.seed, "seed");
  emp->add_option("--norm", enorm, "frobenius or spectral");
  emp->add_option("--metric", emetric, "general, general_squared or old");
  emp->add_option("--sketch", esketch, "JSON sketch descriptor instead of the RSVD sketch");
  emp->add_flag("--records", erecords, "include per-trial records");
  emp->add_option("--out", eout, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen) {
      const SyntheticMatrix mat = synthetic_matrix(gen_n, gen_seed);
      write_matrix_market(std::filesystem::path(gen_out), mat.A);
    } else if (*bounds) {
      const SyntheticMatrix mat = load_matrix(bsrc);
      std::optional<GaussianSketch> custom;
      if (bmean.empty() != bcov.empty()) throw PreconditionError("--mean and --cov go together");
      if (!bcov.empty())
        custom = GaussianSketch::from_moments(read_matrix_market(std::filesystem::path(bmean)),
                                              read_matrix_market(std::filesystem::path(bcov)));
      Json out;
      out["k"] = bk;
      out["p"] = bp;
      out["q"] = bq;
      Json reports = Json::array();
      for (const auto& v : split_list(bvariants)) reports.push_back(bound_report(mat, custom, v, bk, bp, bq));
      out["reports"] = reports;
      write_output(bout, out.dump(2) + "\n");
    } else if (*sweep) {
      SweepConfig cfg = SweepConfig::from_file(sweep_config);
      if (!sweep_out.empty()) cfg.output_path = sweep_out;
      if (!sweep_format.empty()) cfg.output_format = sweep_format;
      const SweepResult res = run_sweep(cfg);
      for (const auto& msg : res.skipped) std::cerr << msg << '\n';
      if (res.excluded > 0) std::cerr << res.excluded << " trial(s) excluded by rank checks\n";
      emit(res.rows, res.variants, cfg.output_format, cfg.output_path);
    } else if (*emp) {
      const SyntheticMatrix mat = load_matrix(esrc);
      const Norm norm = parse_norm(enorm);
      const Metric metric = parse_metric(emetric);
      EmpiricalResult res;
      Json out;
      if (!esketch.empty()) {
        const SketchDescriptor desc = read_sketch_descriptor(esketch);
        const GaussianSketch sketch = load_sketch(desc);
        res = empirical_error(mat.A, mat.svd, sketch, ek, etrials, norm, metric, desc.seed);
        ep = sketch.cols();
      } else {
        if (ep <= 0) throw PreconditionError("--p is required without --sketch");
        res = empirical_error_rsvd(mat.A, mat.svd, eq, ek, ep, etrials, norm, metric, esrc.seed);
      }
      out["k"] = ek;
      out["p"] = ep;
      out["q"] = eq;
      out["norm"] = std::string(to_string(norm));
      out["metric"] = std::string(to_string(metric));
      out["trials"] = etrials;
      out["statistics"] = to_json(res, erecords);
      write_output(eout, out.dump(2) + "\n");
    }
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
