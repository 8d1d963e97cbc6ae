// chaos-bounds: generate coefficient tensors, evaluate moment/tail bounds,
// run Monte Carlo estimates and the verification studies.
//
// Exit codes: 0 all requested bands pass, 1 band violation, 2 usage or
// validation error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "chaosbounds/bounds.hpp"
#include "chaosbounds/families.hpp"
#include "chaosbounds/io.hpp"
#include "chaosbounds/study.hpp"

namespace cb = chaosbounds;

namespace {

cb::NormSpec space_from_arg(const std::string& arg, cb::Index m) {
  if (arg.empty()) {
    return m == 1 ? cb::NormSpec::scalar() : cb::NormSpec::lr_unit(2.0, m);
  }
  if (arg == "scalar") return cb::NormSpec::scalar();
  // Either inline JSON or a shorthand "lr:R".
  if (arg.rfind("lr:", 0) == 0) {
    return cb::NormSpec::lr_unit(std::stod(arg.substr(3)), m);
  }
  return cb::normspec_from_json(cb::Json::parse(arg));
}

void write_json_out(const cb::Json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(out);
  if (!f) throw cb::ValidationError("cannot write " + out);
  f << j.dump(2) << "\n";
}

std::string with_suffix(const std::string& path, const std::string& tag,
                        const std::string& ext) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos) return path + "." + tag + "." + ext;
  return path.substr(0, dot) + "." + tag + path.substr(dot);
}

cb::FormVariant form_from_name(const std::string& name) {
  for (cb::FormVariant v :
       {cb::FormVariant::CenteredQuadratic, cb::FormVariant::DecoupledOffdiag,
        cb::FormVariant::OffdiagQuadratic, cb::FormVariant::LinearGij, cb::FormVariant::LinearX,
        cb::FormVariant::DiagonalOnly, cb::FormVariant::DiagonalExp,
        cb::FormVariant::Noncentered}) {
    if (name == cb::form_name(v)) return v;
  }
  throw cb::ValidationError("unknown form: " + name);
}

cb::DistSpec dist_from_name(const std::string& name) {
  if (name == "gaussian") return cb::DistSpec::gaussian();
  if (name == "rademacher") return cb::DistSpec::rademacher();
  if (name == "uniform_scaled") return cb::DistSpec::uniform_scaled();
  if (name == "truncated_gaussian") return cb::DistSpec::truncated_gaussian();
  throw cb::ValidationError("unknown distribution: " + name);
}

cb::Json terms_json(const cb::BoundTerms& t) {
  const auto one = [](const cb::TermValue& v) {
    cb::Json j{{"value", v.value}, {"provenance", v.prov_name()}};
    if (v.prov != cb::Provenance::Exact) {
      j["seed"] = v.seed;
      j["n_samples"] = v.n_samples;
      j["flagged"] = v.flagged;
    }
    return j;
  };
  return cb::Json{{"e_chaos", one(t.e_chaos)},
                  {"e_lin_gij", one(t.e_lin_gij)},
                  {"sup_x_e_lin", one(t.sup_x_e_lin)},
                  {"u_hs", one(t.u_hs)},
                  {"v", one(t.v)},
                  {"U", t.U()},
                  {"V", t.V()}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic functionals, Monte Carlo estimates and verification "
               "studies for Banach-valued Gaussian quadratic forms"};
  app.set_config("--config", "", "Config file mirroring the flags (TOML/INI)");
  app.require_subcommand(1);

  // Shared options live per subcommand; CLI11 config sections mirror them.
  std::string tensor_path, space_arg, out_path, format_name = "json";
  std::uint64_t seed = 2026;
  std::int64_t samples = 0;
  double constant = 8.0;
  int workers = 0;
  std::vector<double> p_grid = {1, 2, 4, 8};

  auto* gen = app.add_subcommand("gen", "Generate a tensor from a named family");
  std::string family_name_arg = "gaussian_random";
  cb::FamilySpec fspec;
  gen->add_option("--family", family_name_arg, "diagonal|rank_one|gaussian_random|circulant|sparse_bernoulli|adversarial");
  gen->add_option("--n", fspec.n, "index count");
  gen->add_option("--m", fspec.m, "value-space dimension");
  gen->add_option("--space", space_arg, "norm spec: 'scalar', 'lr:R', or inline JSON");
  gen->add_option("--density", fspec.density, "sparse family density");
  gen->add_flag("--unit-entries", fspec.unit_entries, "unit diagonal entries");
  gen->add_flag("--zero-diag", fspec.zero_diag, "zero the generalized diagonal");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--out", out_path, "output tensor JSON path");

  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate bound right-hand sides for a tensor");
  bounds_cmd->add_option("--tensor", tensor_path, "tensor JSON file")->required();
  bounds_cmd->add_option("--space", space_arg, "override the file's norm spec");
  bounds_cmd->add_option("--p-grid", p_grid, "moment orders")->delimiter(',');
  bounds_cmd->add_option("--samples", samples, "Monte Carlo samples for the expectation terms");
  bounds_cmd->add_option("--seed", seed, "Monte Carlo seed");
  bounds_cmd->add_option("--constant", constant, "tail constant c");
  bounds_cmd->add_option("--out", out_path, "output JSON path (stdout if omitted)");

  auto* est = app.add_subcommand("estimate", "Monte Carlo moment / tail estimates");
  std::string form_arg = "centered_quadratic", dist_arg = "gaussian";
  double tail_t = -1.0;
  bool force = false;
  est->add_option("--tensor", tensor_path, "tensor JSON file")->required();
  est->add_option("--space", space_arg, "override the file's norm spec");
  est->add_option("--form", form_arg, "form variant");
  est->add_option("--dist", dist_arg, "sampling family");
  est->add_option("--p-grid", p_grid, "moment orders")->delimiter(',');
  est->add_option("--t", tail_t, "tail threshold (adds a tail estimate)");
  est->add_option("--samples", samples, "sample count (0 = default for the order)");
  est->add_option("--seed", seed, "seed");
  est->add_flag("--force", force, "allow moment orders above 32");
  est->add_option("--out", out_path, "output JSON path (stdout if omitted)");

  auto* verify = app.add_subcommand("verify", "Run the verification studies");
  std::string suite = "all";
  verify->add_option("--suite", suite, "moment|tail|consistency|all");
  verify->add_option("--samples", samples, "per-estimate sample count override");
  verify->add_option("--seed", seed, "master seed");
  verify->add_option("--constant", constant, "frozen tail constant");
  verify->add_option("--workers", workers, "worker threads (0 = hardware)");
  verify->add_option("--out", out_path, "report output path (suffixed per study for 'all')");
  verify->add_option("--format", format_name, "json|csv|markdown");

  auto* conj = app.add_subcommand("conjecture", "Two-sided conjecture evidence study");
  conj->add_option("--tensor", tensor_path, "single polytope tensor JSON (default: built-in instances)");
  conj->add_option("--p-grid", p_grid, "moment orders")->delimiter(',');
  conj->add_option("--samples", samples, "sample count");
  conj->add_option("--seed", seed, "seed");
  conj->add_option("--workers", workers, "worker threads");
  conj->add_option("--out", out_path, "report output path");
  conj->add_option("--format", format_name, "json|csv|markdown");

  auto* report = app.add_subcommand("report", "Re-emit or recheck a stored report");
  std::string in_path;
  bool recheck = false;
  report->add_option("--in", in_path, "stored report (.json or .csv)")->required();
  report->add_option("--format", format_name, "json|csv|markdown");
  report->add_option("--out", out_path, "output path (stdout if omitted)");
  report->add_flag("--recheck", recheck, "recompute verdicts from raw numbers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      fspec.family = cb::family_from_name(family_name_arg);
      fspec.ns = space_from_arg(space_arg, fspec.m);
      const cb::CoefficientTensor t = cb::gen_family(fspec, seed);
      write_json_out(cb::tensor_to_json(t, fspec.ns), out_path);
      return 0;
    }

    if (*bounds_cmd) {
      cb::Problem prob = cb::load_problem(tensor_path);
      if (!space_arg.empty()) prob.space = space_from_arg(space_arg, prob.tensor.m());
      cb::ComputeTermsOptions topts;
      if (samples > 0) topts.mc_samples = samples;
      topts.seed = seed;
      const cb::BoundTerms terms = cb::compute_terms(prob.tensor, prob.space, topts);
      cb::Json out{{"terms", terms_json(terms)}, {"constant", constant}};
      cb::Json rows = cb::Json::array();
      for (double p : p_grid) {
        cb::Json row{{"p", p},
                     {"prop1_lower", cb::prop1_lower(p, terms)},
                     {"thm3_upper_a", cb::thm3_upper(p, terms, cb::LogVariant::A)},
                     {"thm3_upper_b", cb::thm3_upper(p, terms, cb::LogVariant::B)},
                     {"thm4_upper", cb::thm4_upper(p, terms)}};
        if (prob.tensor.m() == 1) row["scalar_mom"] = cb::scalar_mom(p, prob.tensor);
        if (prob.space.kind == cb::NormKind::Lr) {
          const cb::LrMomentBounds lr = cb::cor9_lr_moment(p, prob.tensor, prob.space);
          row["cor9_lower"] = lr.lower;
          row["cor9_upper"] = lr.upper;
        }
        rows.push_back(row);
      }
      out["bounds"] = rows;
      write_json_out(out, out_path);
      return 0;
    }

    if (*est) {
      cb::Problem prob = cb::load_problem(tensor_path);
      if (!space_arg.empty()) prob.space = space_from_arg(space_arg, prob.tensor.m());
      const cb::FormKind kind = cb::FormKind::of(form_from_name(form_arg));
      const cb::DistSpec dist = dist_from_name(dist_arg);
      cb::Json out;
      cb::Json moments = cb::Json::array();
      double max_p = 1.0;
      for (double p : p_grid) max_p = std::max(max_p, p);
      const std::int64_t n = samples > 0 ? samples : cb::default_samples(max_p);
      const cb::NormPool pool =
          cb::sample_norm_pool(prob.tensor, prob.space, kind, dist, n, seed);
      for (double p : p_grid) {
        const cb::MomentEstimate e = cb::moment_from_pool(pool, p, force);
        moments.push_back(cb::Json{{"p", e.p},
                                   {"value", e.value},
                                   {"ci_low", e.ci_low},
                                   {"ci_high", e.ci_high},
                                   {"n_samples", e.n_samples},
                                   {"seed", e.seed}});
      }
      out["moments"] = moments;
      if (tail_t >= 0.0) {
        const cb::TailEstimate te = cb::tail_from_pool(pool, tail_t);
        out["tail"] = cb::Json{{"t", te.t},
                               {"p_hat", te.p_hat},
                               {"ci_low", te.ci_low},
                               {"ci_high", te.ci_high},
                               {"n_samples", te.n_samples},
                               {"seed", te.seed}};
      }
      write_json_out(out, out_path);
      return 0;
    }

    if (*verify) {
      cb::StudyConfig config;
      config.seed = seed;
      config.samples = samples;
      config.constant = constant;
      config.workers = workers;
      const cb::ReportFormat fmt = cb::format_from_name(format_name);
      const std::string ext = format_name == "markdown" ? "md" : format_name;

      std::vector<cb::StudyReport> reports;
      if (suite == "moment") {
        reports.push_back(
            cb::run_moment_ratio_study(cb::moment_study_families(), {1, 2, 4, 8, 16}, config));
      } else if (suite == "tail") {
        reports.push_back(cb::run_tail_study(cb::tail_study_families(), config));
      } else if (suite == "consistency") {
        reports.push_back(cb::run_consistency_suite(config));
      } else if (suite == "all") {
        cb::SuiteResult res = cb::run_default_suite(config);
        reports = std::move(res.reports);
      } else {
        throw cb::ValidationError("unknown suite: " + suite);
      }

      bool pass = true;
      for (const cb::StudyReport& r : reports) {
        pass = pass && r.pass;
        std::cout << r.study << ": " << (r.pass ? "PASS" : "FAIL") << "  (records "
                  << r.records.size() << ", ratio range [" << r.min_ratio << ", "
                  << r.max_ratio << "], " << r.wall_clock_sec << " s)\n";
        if (!out_path.empty()) {
          const std::string path =
              reports.size() == 1 ? out_path : with_suffix(out_path, r.study, ext);
          cb::emit_report_file(r, fmt, path);
        }
      }
      return pass ? 0 : 1;
    }

    if (*conj) {
      cb::StudyConfig config;
      config.seed = seed;
      config.samples = samples;
      config.workers = workers;
      std::vector<cb::FamilySpec> instances;
      if (!tensor_path.empty()) {
        // A single stored problem runs as a one-off instance; the study
        // regenerates family instances otherwise.
        throw cb::ValidationError(
            "conjecture on a stored tensor is not supported; use the built-in instances");
      }
      instances = cb::conjecture_study_families();
      const cb::StudyReport rep = cb::run_conjecture_study(instances, p_grid, config);
      std::cout << "conjecture: max LHS/RHS ratio " << rep.max_ratio << " over "
                << rep.records.size() << " records (evidence only)\n";
      if (!out_path.empty()) {
        cb::emit_report_file(rep, cb::format_from_name(format_name), out_path);
      }
      return 0;
    }

    if (*report) {
      const cb::StudyReport rep = cb::load_report(in_path);
      if (recheck) {
        const bool ok = cb::recheck_report(rep);
        std::cout << "recheck: " << (ok ? "PASS" : "FAIL") << "\n";
      }
      if (!out_path.empty()) {
        cb::emit_report_file(rep, cb::format_from_name(format_name), out_path);
      } else {
        cb::emit_report(rep, cb::format_from_name(format_name), std::cout);
      }
      return 0;
    }
  } catch (const cb::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const cb::ScopeError& e) {
    std::cerr << "scope error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
