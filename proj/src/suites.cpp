#include "ihb/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "ihb/bounds.hpp"
#include "ihb/oracle.hpp"
#include "ihb/parallel.hpp"
#include "ihb/pde.hpp"

namespace ihb {

MeasureSpec random_measure(std::mt19937_64& rng, std::size_t dim,
                           const RandomMeasureOptions& opt) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  const auto lo = static_cast<double>(opt.min_atoms);
  const auto count = static_cast<std::size_t>(uniform(lo, opt.max_atoms + 1.0));
  std::vector<AtomSpec> atoms;
  for (std::size_t i = 0; i < std::clamp(count, opt.min_atoms, opt.max_atoms); ++i) {
    atoms.push_back({sample_uniform(dim, 1, rng())[0], uniform(0.1, 2.0)});
  }
  std::optional<DensitySpec> density;
  if (atoms.empty() || unit(rng) < opt.density_probability) {
    const SpherePoint axis = sample_uniform(dim, 1, rng())[0];
    const double pick = unit(rng);
    if (pick < 1.0 / 3.0) {
      density = DensitySpec(DensityFamily::constant, {uniform(0.2, 2.0)}, axis);
    } else if (pick < 2.0 / 3.0) {
      const auto degree = static_cast<std::size_t>(uniform(2.0, 5.0));
      std::vector<double> c(degree + 1);
      c[0] = uniform(1.0, 2.0);
      // sum_{k>=1} |c_k| < c_0 keeps G positive on [-1, 1].
      for (std::size_t k = 1; k <= degree; ++k) {
        c[k] = 0.9 * c[0] / static_cast<double>(degree) * uniform(-1.0, 1.0);
      }
      density = DensitySpec(DensityFamily::zonal_poly, std::move(c), axis);
    } else {
      density = DensitySpec(DensityFamily::exp_zonal, {uniform(0.2, 2.0), uniform(-3.0, 3.0)},
                            axis);
    }
  }
  return MeasureSpec(dim, std::move(atoms), std::move(density));
}

std::vector<double> linear_grid(std::size_t count, double r_max) {
  if (count < 2) throw Error(ErrorKind::argument, "grid needs at least 2 points");
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = r_max * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return g;
}

std::vector<double> geometric_grid(int K) {
  if (K < 1) throw Error(ErrorKind::argument, "geometric grid needs K >= 1");
  std::vector<double> g{0.0};
  for (int k = 1; k <= K; ++k) g.push_back(1.0 - std::ldexp(1.0, -k));
  return g;
}

std::vector<KernelParams> parse_params_grid(std::string_view spec) {
  std::vector<KernelParams> out;
  auto fail = [&] {
    throw Error(ErrorKind::argument, "bad params grid '" + std::string(spec) +
                                         "'; expected field:n1,n2:l1,l2[;...]");
  };
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t end = spec.find(';', pos);
    if (end == std::string_view::npos) end = spec.size();
    const std::string_view item = spec.substr(pos, end - pos);
    const std::size_t c1 = item.find(':');
    const std::size_t c2 = c1 == std::string_view::npos ? c1 : item.find(':', c1 + 1);
    if (c2 == std::string_view::npos) fail();
    const std::string_view field = item.substr(0, c1);
    Field f;
    if (field == "real") {
      f = Field::real;
    } else if (field == "complex") {
      f = Field::complex;
    } else {
      fail();
    }
    for (double n : parse_csv_floats(item.substr(c1 + 1, c2 - c1 - 1))) {
      if (n != std::floor(n) || n < 1 || n > 64) fail();
      for (double l : parse_csv_floats(item.substr(c2 + 1))) {
        out.emplace_back(f, static_cast<int>(n), l);
      }
    }
    pos = end + 1;
  }
  if (out.empty()) fail();
  return out;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"monotone", "harnack", "lemma-bounds", "extrema",
                                              "residual", "all"};
  return names;
}

namespace {

std::vector<KernelParams> grid_of(Field f, const std::vector<int>& ns,
                                  const std::vector<double>& lambdas) {
  std::vector<KernelParams> g;
  for (int n : ns) {
    for (double l : lambdas) {
      const KernelParams p(f, n, l);
      if (!p.degenerate()) g.push_back(p);
    }
  }
  return g;
}

std::vector<KernelParams> nondegenerate(std::vector<KernelParams> g) {
  std::erase_if(g, [](const KernelParams& p) { return p.degenerate(); });
  if (g.empty()) throw Error(ErrorKind::argument, "params grid has only degenerate entries");
  return g;
}

std::vector<KernelParams> monotone_default_grid() {
  std::vector<KernelParams> g = grid_of(Field::real, {2, 3}, {-3.0, -2.0, 0.0, 0.5, 2.0});
  const std::vector<KernelParams> c = grid_of(Field::complex, {1, 2}, {-4.0, -2.5, 0.0, 1.0});
  g.insert(g.end(), c.begin(), c.end());
  return g;
}

QuadratureRule rule_for(const KernelParams& p, std::uint64_t seed) {
  const std::size_t d = p.sphere_dim();
  if (d <= 4 && AlignedGeometry::supported(p)) {
    return build_quadrature(d, 16, RuleKind::deterministic_product);
  }
  return build_quadrature(d, 20000, RuleKind::monte_carlo, seed);
}

json measure_json(const MeasureSpec& m) { return json::parse(measure_to_json(m)); }

struct Outcome {
  bool violated = false;
  double slack = 0.0;
  json payload;
};

// Runs `count` independent configurations in parallel and folds them in order.
SweepSummary sweep(const std::string& name, std::size_t count,
                   const std::function<Outcome(std::size_t)>& body) {
  std::vector<Outcome> out(count);
  parallel::for_each_index(count, [&](std::size_t i) { out[i] = body(i); });
  SweepSummary s;
  s.check = name;
  s.trials = count;
  s.worst_slack = count == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    s.worst_slack = std::min(s.worst_slack, out[i].slack);
    if (!out[i].violated) continue;
    ++s.violations;
    if (s.counterexamples.size() < kMaxCounterexamples) {
      out[i].payload["trial"] = i;
      s.counterexamples.push_back(std::move(out[i].payload));
    }
  }
  return s;
}

SweepRanges ranges_from(const std::vector<KernelParams>& grid, Field f) {
  SweepRanges r;
  for (const KernelParams& p : grid) {
    if (p.field != f) continue;
    if (std::find(r.ns.begin(), r.ns.end(), p.n) == r.ns.end()) r.ns.push_back(p.n);
    if (std::find(r.lambdas.begin(), r.lambdas.end(), p.lambda) == r.lambdas.end()) {
      r.lambdas.push_back(p.lambda);
    }
  }
  return r;
}

std::vector<SweepSummary> monotone_suite(const SuiteOptions& opt) {
  const std::vector<KernelParams> grid =
      nondegenerate(opt.grid.empty() ? monotone_default_grid() : opt.grid);
  const std::vector<double> r_grid = linear_grid(64, 0.999);
  std::vector<SweepSummary> out;
  out.push_back(sweep("monotone-normalizations", opt.trials, [&](std::size_t i) {
    const KernelParams& p = grid[i % grid.size()];
    std::mt19937_64 rng(parallel::derive_seed(opt.seed, 101, i));
    const MeasureSpec m = random_measure(rng, p.sphere_dim());
    const SpherePoint zeta = sample_uniform(p.sphere_dim(), 1, rng())[0];
    const RadialProfile prof = radial_profile(p, m, zeta, r_grid, rule_for(p, rng()));
    const MonotoneReport rep = monotone_profiles(prof);
    Outcome o;
    o.violated = !rep.verdict();
    o.slack = std::min(rep.phi.worst_margin, rep.psi.worst_margin);
    o.payload = {{"params", params_to_json(p)},
                 {"measure", measure_json(m)},
                 {"zeta", vector_to_json(zeta.coords())},
                 {"phi_first_violation",
                  rep.phi.first_violation ? json(*rep.phi.first_violation) : json(nullptr)},
                 {"psi_first_violation",
                  rep.psi.first_violation ? json(*rep.psi.first_violation) : json(nullptr)}};
    return o;
  }));
  std::vector<KernelParams> real;
  std::copy_if(grid.begin(), grid.end(), std::back_inserter(real),
               [](const KernelParams& p) { return p.field == Field::real; });
  if (!real.empty()) {
    out.push_back(sweep("potential-identity", opt.trials, [&](std::size_t i) {
      const KernelParams& p = real[i % real.size()];
      std::mt19937_64 rng(parallel::derive_seed(opt.seed, 102, i));
      const MeasureSpec m = random_measure(rng, p.sphere_dim());
      const SpherePoint zeta = sample_uniform(p.sphere_dim(), 1, rng())[0];
      const double r = std::uniform_real_distribution<double>(0.0, 0.99)(rng);
      const QuadratureRule rule = rule_for(p, rng());
      const BallPoint x(r, zeta);
      const Evaluation U = evaluate_potential_U(p, m, x, rule);
      const Evaluation u = evaluate_u(p, m, x, rule);
      const double left = std::pow(1.0 - r, p.distance_exponent()) * U.value;
      const double right = phi(p, r) * u.value;
      const double tol = 10.0 * (U.error / U.value + u.error / u.value) + 1e-12;
      const double gap = std::abs(left - right) / std::abs(right);
      Outcome o;
      o.violated = gap > tol;
      o.slack = tol - gap;
      o.payload = {{"params", params_to_json(p)}, {"measure", measure_json(m)},
                   {"zeta", vector_to_json(zeta.coords())}, {"r", r},
                   {"left", left}, {"right", right}};
      return o;
    }));
  }
  return out;
}

std::vector<SweepSummary> harnack_suite(const SuiteOptions& opt) {
  std::vector<SweepSummary> out;
  out.push_back(inequality_sweep("envelope-forms", opt.trials, opt.seed));
  out.push_back(inequality_sweep("envelope", opt.trials, opt.seed));
  const std::vector<KernelParams> grid =
      nondegenerate(opt.grid.empty() ? monotone_default_grid() : opt.grid);
  out.push_back(sweep("envelope-measures", opt.trials, [&](std::size_t i) {
    const KernelParams& p = grid[i % grid.size()];
    std::mt19937_64 rng(parallel::derive_seed(opt.seed, 201, i));
    const MeasureSpec m = random_measure(rng, p.sphere_dim());
    const SpherePoint zeta = sample_uniform(p.sphere_dim(), 1, rng())[0];
    std::uniform_real_distribution<double> unit(0.0, 0.99);
    double r1 = unit(rng);
    double r2 = unit(rng);
    if (r1 > r2) std::swap(r1, r2);
    const EnvelopeReport e = verify_envelope(p, m, zeta, r1, r2, rule_for(p, rng()));
    Outcome o;
    o.violated = !e.verdict;
    o.slack = std::min(e.slack.first, e.slack.second);
    o.payload = {{"params", params_to_json(p)}, {"measure", measure_json(m)},
                 {"zeta", vector_to_json(zeta.coords())}, {"r_prime", r1}, {"r", r2},
                 {"lower", e.lower}, {"upper", e.upper}, {"observed", e.observed}};
    return o;
  }));
  out.push_back(sweep("classical-harnack", 1, [&](std::size_t) {
    // r' = 0, n = 2, lambda = 0, r = 1/2: (1-r)/(1+r) u(0) <= u <= (1+r)/(1-r) u(0).
    const HarnackEnvelope e = harnack_envelope(KernelParams(Field::real, 2, 0.0), 1.0, 0.0, 0.5);
    const double gap = std::max(std::abs(e.lower - 1.0 / 3.0), std::abs(e.upper - 3.0));
    Outcome o;
    o.violated = gap > 1e-15;
    o.slack = 1e-15 - gap;
    o.payload = {{"lower", e.lower}, {"upper", e.upper}};
    return o;
  }));
  return out;
}

std::vector<SweepSummary> derivative_bound_suite(const SuiteOptions& opt) {
  std::vector<SweepSummary> out;
  const SweepRanges real = ranges_from(opt.grid, Field::real);
  const SweepRanges cplx = ranges_from(opt.grid, Field::complex);
  if (opt.negative_control) {
    out.push_back(inequality_sweep("complex-derivative-reduced-exponent", opt.trials, opt.seed, cplx));
    out.push_back(inequality_sweep("complex-derivative-halved-coefficient", opt.trials, opt.seed, cplx));
    return out;
  }
  out.push_back(inequality_sweep("scalar-inequality", opt.trials, opt.seed));
  out.push_back(inequality_sweep("real-derivative", opt.trials, opt.seed, real));
  out.push_back(inequality_sweep("complex-derivative", opt.trials, opt.seed, cplx));
  out.push_back(inequality_sweep("log-derivative", opt.trials, opt.seed));
  return out;
}

std::vector<SweepSummary> extrema_suite(const SuiteOptions& opt) {
  std::vector<KernelParams> grid = opt.grid.empty()
                                       ? grid_of(Field::real, {2}, {0.5, -2.0})
                                       : nondegenerate(opt.grid);
  std::erase_if(grid, [](const KernelParams& p) { return p.field != Field::real; });
  if (grid.empty()) return {};
  std::vector<SweepSummary> out;
  out.push_back(sweep("sphere-extrema", opt.trials, [&](std::size_t i) {
    const KernelParams& p = grid[i % grid.size()];
    const std::size_t d = p.sphere_dim();
    std::mt19937_64 rng(parallel::derive_seed(opt.seed, 301, i));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const MeasureSpec m(d,
                        {{sample_uniform(d, 1, rng())[0], 0.1 + 1.9 * unit(rng)},
                         {sample_uniform(d, 1, rng())[0], 0.1 + 1.9 * unit(rng)}},
                        std::nullopt);
    double r1 = 0.95 * unit(rng);
    double r2 = 0.95 * unit(rng);
    if (r1 > r2) std::swap(r1, r2);
    const SphereExtremaReport rep =
        sphere_extrema_bounds(p, m, r1, r2, rule_for(p, 0), 64, rng());
    Outcome o;
    o.violated = !rep.verdict();
    o.slack = std::numeric_limits<double>::infinity();
    for (const ExtremaComparison& c : rep.comparisons) {
      const double margin = (c.less_equal ? c.right - c.left : c.left - c.right) /
                            std::max(std::abs(c.left), std::abs(c.right));
      o.slack = std::min(o.slack, margin);
    }
    o.payload = {{"params", params_to_json(p)}, {"measure", measure_json(m)},
                 {"r_prime", r1}, {"r", r2}, {"max_r", rep.max_r.value},
                 {"min_r", rep.min_r.value}, {"max_r_prime", rep.max_rp.value},
                 {"min_r_prime", rep.min_rp.value}};
    return o;
  }));
  const std::vector<double> unit_grid = linear_grid(32, 0.99);
  out.push_back(sweep("scaled-ball", opt.trials, [&](std::size_t i) {
    const KernelParams& p = grid[i % grid.size()];
    std::mt19937_64 rng(parallel::derive_seed(opt.seed, 302, i));
    const MeasureSpec m = random_measure(rng, p.sphere_dim());
    const SpherePoint zeta = sample_uniform(p.sphere_dim(), 1, rng())[0];
    const double R = std::exp(std::uniform_real_distribution<double>(-1.5, 1.5)(rng));
    const RadialProfile unit_prof = radial_profile(p, m, zeta, unit_grid, rule_for(p, 0));
    // u_R(x) = u(x / R) solves the same equation on the ball of radius R.
    RadialProfile scaled = unit_prof;
    for (double& r : scaled.r_grid) r *= R;
    const MonotoneReport a = monotone_profiles(unit_prof);
    const MonotoneReport b = scaled_ball_profiles(p, R, scaled);
    double diff = 0.0;
    for (std::size_t k = 0; k < a.phi_u.size(); ++k) {
      diff = std::max(diff, std::abs(a.phi_u[k] - b.phi_u[k]) / std::abs(a.phi_u[k]));
      diff = std::max(diff, std::abs(a.psi_u[k] - b.psi_u[k]) / std::abs(a.psi_u[k]));
    }
    Outcome o;
    o.violated = a.verdict() != b.verdict() || !b.verdict() || diff > 1e-12;
    o.slack = 1e-12 - diff;
    o.payload = {{"params", params_to_json(p)}, {"measure", measure_json(m)},
                 {"zeta", vector_to_json(zeta.coords())}, {"R", R},
                 {"unit_verdict", a.verdict()}, {"scaled_verdict", b.verdict()},
                 {"max_rel_diff", diff}};
    return o;
  }));
  return out;
}

std::vector<SweepSummary> residual_suite(const SuiteOptions& opt) {
  std::vector<KernelParams> grid = opt.grid;
  if (grid.empty()) {
    grid = grid_of(Field::real, {2, 3}, {-2.0, 0.0, 0.5, 2.0});
    const std::vector<KernelParams> c1 = grid_of(Field::complex, {1}, {-2.0, 0.0, 1.0});
    grid.insert(grid.end(), c1.begin(), c1.end());
    grid.emplace_back(Field::complex, 2, -0.5);
  }
  const double tol = opt.tol.value_or(1e-3);
  const std::size_t samples = std::max<std::size_t>(4, opt.trials / grid.size());
  std::vector<SweepSummary> out;
  out.push_back(sweep("pde-residual", grid.size(), [&](std::size_t i) {
    const KernelParams& p = grid[i];
    std::mt19937_64 rng(parallel::derive_seed(opt.seed, 401, i));
    const MeasureSpec m = random_measure(rng, p.sphere_dim(), {1, 3, 0.0});
    const std::uint64_t points = rng();
    const ResidualReport rep = residual_report(p, m, rule_for(p, 0), samples, points, 1e-3);
    // Orders come from a coarser pair of steps: near the origin the residual
    // at h = 1e-3 can already sit on the roundoff floor.
    const ResidualReport coarse =
        residual_report(p, m, rule_for(p, 0), samples, points, kResidualOrderStep);
    Outcome o;
    const bool order_ok = coarse.order_min >= 1.7 && coarse.order_max <= 2.3;
    o.violated = !order_ok || !(rep.max_residual <= tol);
    o.slack = tol - rep.max_residual;
    o.payload = residual_report_json(rep);
    o.payload["order_step"] = kResidualOrderStep;
    o.payload["order_range_at_order_step"] = {coarse.order_min, coarse.order_max};
    o.payload["measure"] = measure_json(m);
    return o;
  }));
  return out;
}

}  // namespace

SuiteResult run_suite(const std::string& name, const SuiteOptions& opt) {
  if (std::find(suite_names().begin(), suite_names().end(), name) == suite_names().end()) {
    throw Error(ErrorKind::unknown_check, "unknown suite '" + name + "'");
  }
  std::vector<SweepSummary> checks;
  auto add = [&](std::vector<SweepSummary> s) {
    for (SweepSummary& x : s) checks.push_back(std::move(x));
  };
  if (name == "monotone" || name == "all") add(monotone_suite(opt));
  if (name == "harnack" || name == "all") add(harnack_suite(opt));
  if (name == "lemma-bounds" || name == "all") add(derivative_bound_suite(opt));
  if (name == "extrema" || name == "all") add(extrema_suite(opt));
  if (name == "residual" || name == "all") add(residual_suite(opt));
  SuiteResult res;
  json list = json::array();
  for (const SweepSummary& s : checks) {
    res.violations += s.violations;
    list.push_back(sweep_summary_json(s));
  }
  res.report = {{"suite", name},
                {"seed", opt.seed},
                {"trials", opt.trials},
                {"negative_control", opt.negative_control},
                {"checks", list},
                {"violations", res.violations}};
  return res;
}

}  // namespace ihb
