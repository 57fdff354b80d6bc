#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <ostream>

#include "ihb/bounds.hpp"
#include "ihb/limits.hpp"
#include "ihb/suites.hpp"

namespace ihb::cli {

namespace {

struct Inputs {
  std::string params_file;
  std::string measure_file;
  std::string rule = "16";
  std::uint64_t seed = 0;
};

void add_inputs(CLI::App* cmd, Inputs& in) {
  cmd->add_option("--params", in.params_file, "kernel parameters JSON")->required();
  cmd->add_option("--measure", in.measure_file, "measure JSON")->required();
  cmd->add_option("--rule", in.rule, "quadrature level, or LEVEL,mc for Monte Carlo");
  cmd->add_option("--seed", in.seed, "seed for Monte Carlo rules");
}

struct Loaded {
  KernelParams params;
  MeasureSpec measure;
  QuadratureRule rule;
};

QuadratureRule parse_rule(const std::string& spec, std::size_t dim, std::uint64_t seed) {
  std::string level = spec;
  RuleKind kind = RuleKind::deterministic_product;
  if (const auto comma = spec.find(','); comma != std::string::npos) {
    if (spec.substr(comma + 1) != "mc") {
      throw Error(ErrorKind::argument, "rule must be LEVEL or LEVEL,mc");
    }
    level = spec.substr(0, comma);
    kind = RuleKind::monte_carlo;
  }
  const std::vector<double> v = parse_csv_floats(level);
  if (v.size() != 1 || v[0] < 1 || v[0] != std::floor(v[0])) {
    throw Error(ErrorKind::argument, "rule level must be a positive integer");
  }
  return build_quadrature(dim, static_cast<std::size_t>(v[0]), kind, seed);
}

Loaded load(const Inputs& in) {
  const KernelParams p = parse_params(read_text_file(in.params_file));
  MeasureSpec m = parse_measure(read_text_file(in.measure_file));
  if (m.dim() != p.sphere_dim()) {
    throw Error(ErrorKind::dimension_mismatch,
                "measure dim " + std::to_string(m.dim()) + " does not match " + p.describe() +
                    " (expected " + std::to_string(p.sphere_dim()) + ")");
  }
  return {p, std::move(m), parse_rule(in.rule, p.sphere_dim(), in.seed)};
}

SpherePoint parse_direction(const std::string& s, std::size_t dim) {
  if (s.empty()) return SpherePoint::basis(dim, dim - 1);
  std::vector<double> v = parse_csv_floats(s);
  if (v.size() != dim) {
    throw Error(ErrorKind::dimension_mismatch,
                "direction needs " + std::to_string(dim) + " coordinates");
  }
  return SpherePoint(std::move(v));
}

std::vector<double> parse_grid(const std::string& spec) {
  auto bad = [&] {
    return Error(ErrorKind::argument,
                 "bad grid '" + spec + "'; expected geometric:K or linear:N:RMAX");
  };
  if (spec.starts_with("geometric:")) {
    const std::vector<double> v = parse_csv_floats(spec.substr(10));
    if (v.size() != 1 || v[0] < 1 || v[0] > 19 || v[0] != std::floor(v[0])) throw bad();
    return geometric_grid(static_cast<int>(v[0]));
  }
  if (spec.starts_with("linear:")) {
    const std::string rest = spec.substr(7);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw bad();
    const std::vector<double> n = parse_csv_floats(rest.substr(0, colon));
    const std::vector<double> rmax = parse_csv_floats(rest.substr(colon + 1));
    if (n.size() != 1 || rmax.size() != 1 || n[0] < 2 || n[0] != std::floor(n[0]) ||
        n[0] > 1e6) {
      throw bad();
    }
    return linear_grid(static_cast<std::size_t>(n[0]), rmax[0]);
  }
  throw bad();
}

json scan_json(const MonotoneScan& s) {
  return {{"verdict", s.verdict},
          {"first_violation", s.first_violation ? json(*s.first_violation) : json(nullptr)},
          {"worst_margin", s.worst_margin}};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Positive invariant harmonic functions on the real and complex unit ball"};
  app.require_subcommand(1);

  Inputs eval_in;
  double eval_r = 0.0;
  std::string eval_dir;
  std::string eval_out = "text";
  CLI::App* eval = app.add_subcommand("eval", "evaluate u(r zeta) for a boundary measure");
  add_inputs(eval, eval_in);
  eval->add_option("--r", eval_r, "radius, 0 <= r < 1");
  eval->add_option("--dir", eval_dir, "direction as comma-separated floats");
  eval->add_option("--out", eval_out, "json or text")->check(CLI::IsMember({"json", "text"}));

  Inputs prof_in;
  std::string prof_zeta;
  std::string prof_grid = "linear:64:0.999";
  std::string prof_out;
  bool prof_normalized = false;
  CLI::App* profile = app.add_subcommand("profile", "radial profile of u as CSV");
  add_inputs(profile, prof_in);
  profile->add_option("--zeta", prof_zeta, "ray direction as comma-separated floats");
  profile->add_option("--r-grid", prof_grid, "geometric:K or linear:N:RMAX");
  profile->add_option("--out", prof_out, "CSV file (default stdout)");
  profile->add_flag("--normalized", prof_normalized, "append monotonicity verdicts");

  std::string suite;
  SuiteOptions suite_opt;
  double suite_tol = 0.0;
  std::string suite_grid;
  CLI::App* verify = app.add_subcommand("verify", "run verification suites");
  verify->add_option("suite", suite, "monotone|harnack|lemma-bounds|extrema|residual|all")
      ->required();
  verify->add_option("--trials", suite_opt.trials, "random configurations per check");
  verify->add_option("--seed", suite_opt.seed, "master seed");
  CLI::Option* tol_opt = verify->add_option("--tol", suite_tol, "tolerance override");
  verify->add_option("--params-grid", suite_grid, "field:n1,n2:l1,l2[;...]");
  verify->add_flag("--negative-control", suite_opt.negative_control,
                   "run the deliberately wrong bound variants");

  Inputs lim_in;
  std::string lim_kind;
  std::string lim_zeta;
  int lim_ladder = 18;
  CLI::App* limit = app.add_subcommand("limit", "boundary limit along a ray");
  limit->add_option("kind", lim_kind, "mass or potential")
      ->required()
      ->check(CLI::IsMember({"mass", "potential"}));
  add_inputs(limit, lim_in);
  limit->add_option("--zeta", lim_zeta, "boundary point as comma-separated floats");
  limit->add_option("--ladder", lim_ladder, "last rung K of r_k = 1 - 2^-k");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*eval) {
      const Loaded in = load(eval_in);
      const BallPoint x(eval_r, parse_direction(eval_dir, in.params.sphere_dim()));
      const Evaluation e = evaluate_u(in.params, in.measure, x, in.rule);
      if (eval_out == "json") {
        out << dump(json{{"params", params_to_json(in.params)},
                         {"r", x.r()},
                         {"dir", vector_to_json(x.direction().coords())},
                         {"u", e.value},
                         {"error", e.error},
                         {"low_confidence", e.low_confidence}});
      } else {
        out << format_double(e.value) << "\n";
        out << "error " << format_double(e.error) << (e.low_confidence ? " low-confidence" : "")
            << "\n";
      }
      return 0;
    }
    if (*profile) {
      const Loaded in = load(prof_in);
      const std::vector<double> grid = parse_grid(prof_grid);
      const SpherePoint zeta = parse_direction(prof_zeta, in.params.sphere_dim());
      const RadialProfile prof = radial_profile(in.params, in.measure, zeta, grid, in.rule);
      std::string text = profile_csv(prof);
      if (prof_normalized) {
        const MonotoneReport rep = monotone_profiles(prof);
        const json footer{{"phi_u", scan_json(rep.phi)},
                          {"psi_u", scan_json(rep.psi)},
                          {"phi_u_expected", rep.phi_decreasing_expected ? "non-increasing"
                                                                         : "non-decreasing"},
                          {"low_confidence", rep.low_confidence},
                          {"verdict", rep.verdict()}};
        text += "# " + footer.dump() + "\n";
      }
      if (prof_out.empty() || prof_out == "-") {
        out << text;
      } else {
        std::ofstream f(prof_out, std::ios::binary);
        if (!f) throw Error(ErrorKind::io, "cannot write " + prof_out);
        f << text;
      }
      return 0;
    }
    if (*verify) {
      if (tol_opt->count() > 0) suite_opt.tol = suite_tol;
      if (!suite_grid.empty()) suite_opt.grid = parse_params_grid(suite_grid);
      const SuiteResult res = run_suite(suite, suite_opt);
      out << dump(res.report);
      return res.violations == 0 ? 0 : 1;
    }
    if (*limit) {
      const Loaded in = load(lim_in);
      const SpherePoint zeta = parse_direction(lim_zeta, in.params.sphere_dim());
      LadderOptions opt;
      opt.k_max = lim_ladder;
      opt.k_extend = std::max(opt.k_extend, lim_ladder);
      if (lim_ladder < opt.k_min + 3 || lim_ladder > 52) {
        throw Error(ErrorKind::argument, "--ladder must lie in [6, 52]");
      }
      const LimitReport rep = lim_kind == "mass"
                                  ? limit_mass(in.params, in.measure, zeta, in.rule, opt)
                                  : limit_potential(in.params, in.measure, zeta, in.rule, opt);
      out << dump(limit_report_json(rep));
      return rep.classes_agree() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace ihb::cli
