#include "ihb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "ihb/bounds.hpp"
#include "ihb/parallel.hpp"

namespace ihb {

namespace {

constexpr std::uint64_t kOracleStream = 0x6f7261636c65ULL;
constexpr std::size_t kChunk = 1 << 15;

double density_at(const DensitySpec& g, std::span<const double> xi) {
  const std::vector<double>& axis = g.axis().coords();
  double t = 0.0;
  for (std::size_t i = 0; i < xi.size(); ++i) t += xi[i] * axis[i];
  const std::vector<double>& c = g.params();
  switch (g.family()) {
    case DensityFamily::constant:
      return c[0];
    case DensityFamily::zonal_poly: {
      double v = 0.0;
      for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
      return v;
    }
    case DensityFamily::exp_zonal:
      return c[0] * std::exp(c[1] * t);
  }
  return 0.0;
}

double unit_sphere_area(std::size_t d) {
  const double half = 0.5 * static_cast<double>(d);
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

struct Chunk {
  double sum = 0.0;
  double sum_sq = 0.0;
};

OracleValue monte_carlo(std::size_t dim, std::size_t samples, std::uint64_t seed,
                        const std::function<double(std::span<const double>)>& f) {
  if (samples < 2) throw Error(ErrorKind::argument, "oracle needs at least 2 samples");
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<Chunk> parts(chunks);
  parallel::for_each_index(chunks, [&](std::size_t c) {
    std::mt19937_64 rng(parallel::derive_seed(seed, kOracleStream, c));
    std::normal_distribution<double> normal;
    std::vector<double> xi(dim);
    const std::size_t count = std::min(kChunk, samples - c * kChunk);
    Chunk acc;
    for (std::size_t s = 0; s < count; ++s) {
      double n2 = 0.0;
      do {
        n2 = 0.0;
        for (double& v : xi) {
          v = normal(rng);
          n2 += v * v;
        }
      } while (n2 == 0.0);
      const double inv = 1.0 / std::sqrt(n2);
      for (double& v : xi) v *= inv;
      const double y = f(xi);
      acc.sum += y;
      acc.sum_sq += y * y;
    }
    parts[c] = acc;
  });
  Chunk total;
  for (const Chunk& c : parts) {
    total.sum += c.sum;
    total.sum_sq += c.sum_sq;
  }
  const double nn = static_cast<double>(samples);
  const double mean = total.sum / nn;
  const double var = std::max(0.0, (total.sum_sq / nn - mean * mean) * nn / (nn - 1.0));
  const double area = unit_sphere_area(dim);
  return {area * mean, area * std::sqrt(var / nn)};
}

}  // namespace

double oracle_kernel(const KernelParams& p, std::span<const double> x,
                     std::span<const double> zeta) {
  double x2 = 0.0;
  for (double v : x) x2 += v * v;
  const double q = p.boundary_exponent();
  const double pw = p.distance_exponent();
  double dist;
  if (p.field == Field::real) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - zeta[i]) * (x[i] - zeta[i]);
    dist = std::sqrt(d2);
  } else {
    std::complex<double> s = 0.0;
    for (std::size_t j = 0; j + 1 < x.size(); j += 2) {
      s += std::complex<double>(x[j], x[j + 1]) * std::conj(std::complex<double>(zeta[j], zeta[j + 1]));
    }
    dist = std::abs(1.0 - s);
  }
  return std::pow(1.0 - x2, q) / std::pow(dist, pw);
}

OracleValue oracle_evaluate_u(const KernelParams& p, const MeasureSpec& m,
                              std::span<const double> x, std::size_t samples,
                              std::uint64_t seed) {
  if (x.size() != p.sphere_dim() || m.dim() != p.sphere_dim()) {
    throw Error(ErrorKind::dimension_mismatch, "oracle: dimensions do not match " + p.describe());
  }
  OracleValue out;
  for (const AtomSpec& a : m.atoms()) out.value += a.weight * oracle_kernel(p, x, a.point.coords());
  if (m.has_density()) {
    const DensitySpec& g = *m.density();
    const OracleValue d = monte_carlo(m.dim(), samples, seed, [&](std::span<const double> xi) {
      return oracle_kernel(p, x, xi) * density_at(g, xi);
    });
    out.value += d.value;
    out.std_error = d.std_error;
  }
  return out;
}

OracleValue oracle_density_integral(const MeasureSpec& m,
                                    const std::function<double(std::span<const double>)>& k,
                                    std::size_t samples, std::uint64_t seed) {
  if (!m.has_density()) return {};
  const DensitySpec& g = *m.density();
  return monte_carlo(m.dim(), samples, seed,
                     [&](std::span<const double> xi) { return k(xi) * density_at(g, xi); });
}

ScanResult oracle_monotone_scan(const std::vector<double>& values, Direction dir, double slack) {
  if (values.size() < 2) throw Error(ErrorKind::argument, "monotone scan needs >= 2 values");
  ScanResult res;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double rise = dir == Direction::non_increasing ? values[i + 1] - values[i]
                                                         : values[i] - values[i + 1];
    const double allowed = slack * std::max(std::abs(values[i]), std::abs(values[i + 1]));
    if (rise > allowed) {
      res.verdict = false;
      res.first_violation = i + 1;
      return res;
    }
  }
  return res;
}

namespace {

struct Trial {
  bool violated = false;
  double slack = 0.0;
  json payload;
};

class TrialRng {
 public:
  explicit TrialRng(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  template <class T>
  T pick(const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng_)];
  }
  SpherePoint direction(std::size_t d) { return sample_uniform(d, 1, rng_())[0]; }
  std::uint64_t next() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

KernelParams pick_params(TrialRng& rng, Field f, const SweepRanges& ranges,
                         const std::vector<int>& default_ns,
                         const std::vector<double>& default_lambdas) {
  const std::vector<int>& ns = ranges.ns.empty() ? default_ns : ranges.ns;
  const std::vector<double>& ls = ranges.lambdas.empty() ? default_lambdas : ranges.lambdas;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const KernelParams p(f, rng.pick(ns), rng.pick(ls));
    if (!p.degenerate()) return p;
  }
  throw Error(ErrorKind::argument, "parameter ranges contain only degenerate values");
}

json point_json(const std::vector<double>& v) { return vector_to_json(v); }

// x = r eta with eta = +-zeta in a tenth of the trials (the equality cases).
std::pair<BallPoint, SpherePoint> pick_configuration(TrialRng& rng, std::size_t d, double r_max) {
  const SpherePoint zeta = rng.direction(d);
  const double r = rng.uniform(0.0, r_max);
  const double u = rng.uniform(0.0, 1.0);
  if (u < 0.05) return {BallPoint(r, zeta), zeta};
  if (u < 0.10) return {BallPoint(r, zeta.negated()), zeta};
  return {BallPoint(r, rng.direction(d)), zeta};
}

Trial kernel_bound_trial(const KernelParams& p, const BallPoint& x, const SpherePoint& zeta,
                         const BoundCheck& c) {
  Trial t;
  const double norm = 1.0 + std::abs(p.a()) + std::abs(p.b());
  t.slack = std::min(c.slack_lower, c.slack_upper) / norm;
  t.violated = !c.verdict;
  t.payload = {{"params", params_to_json(p)},
               {"r", x.r()},
               {"eta", point_json(x.direction().coords())},
               {"zeta", point_json(zeta.coords())},
               {"lower", c.lower},
               {"upper", c.upper},
               {"observed", c.observed},
               {"slack", t.slack}};
  return t;
}

MeasureSpec random_atoms(TrialRng& rng, std::size_t d, std::size_t max_atoms) {
  const auto count = static_cast<std::size_t>(rng.uniform(1.0, max_atoms + 1.0));
  std::vector<AtomSpec> atoms;
  for (std::size_t i = 0; i < std::max<std::size_t>(count, 1); ++i) {
    atoms.push_back({rng.direction(d), rng.uniform(0.1, 2.0)});
  }
  return MeasureSpec(d, std::move(atoms), std::nullopt);
}

const std::vector<int> kRealNs{2, 3, 4};
const std::vector<double> kRealLambdas{-3.0, -1.2, 0.0, 0.7, 2.0};
const std::vector<int> kComplexNs{1, 2, 3};
const std::vector<double> kComplexAlphas{-4.0, -2.5, -0.5, 0.0, 1.0};

Trial run_trial(const std::string& check, TrialRng& rng, const SweepRanges& ranges) {
  if (check == "scalar-inequality") {
    const double rad = rng.uniform(0.0, 1.0) < 0.05 ? 1.0 : std::sqrt(rng.uniform(0.0, 1.0));
    const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const std::complex<double> a = std::polar(rad, ang);
    const double r = rng.uniform(0.0, 1.0);
    const ScalarInequality s = scalar_inequality(a, r);
    Trial t;
    t.slack = std::min(s.slack_first, s.slack_second);
    t.violated = !(s.first && s.second);
    t.payload = {{"a", {a.real(), a.imag()}}, {"r", r}, {"slack_first", s.slack_first},
                 {"slack_second", s.slack_second}};
    return t;
  }
  if (check == "real-derivative") {
    const KernelParams p = pick_params(rng, Field::real, ranges, kRealNs, kRealLambdas);
    const auto [x, zeta] = pick_configuration(rng, p.sphere_dim(), ranges.r_max);
    return kernel_bound_trial(p, x, zeta, real_derivative_bounds(p, x, zeta));
  }
  if (check.starts_with("complex-derivative")) {
    ComplexBoundForm form = ComplexBoundForm::consistent;
    if (check == "complex-derivative-reduced-exponent") form = ComplexBoundForm::reduced_exponent;
    if (check == "complex-derivative-halved-coefficient") form = ComplexBoundForm::halved_coefficient;
    const KernelParams p = pick_params(rng, Field::complex, ranges, kComplexNs, kComplexAlphas);
    const auto [x, zeta] = pick_configuration(rng, p.sphere_dim(), ranges.r_max);
    return kernel_bound_trial(p, x, zeta, complex_derivative_bounds(p, x, zeta, form));
  }
  if (check == "log-derivative") {
    // (1-r^2) u'/u for an atomic u, from exact kernel derivatives.
    const Field f = rng.uniform(0.0, 1.0) < 0.5 ? Field::real : Field::complex;
    const KernelParams p = f == Field::real
                               ? pick_params(rng, f, ranges, {2, 3}, {-3.0, -2.0, -1.2, 0.0, 0.5, 2.0})
                               : pick_params(rng, f, ranges, {1, 2}, {-4.0, -2.5, 0.0, 1.0});
    const std::size_t d = p.sphere_dim();
    const MeasureSpec m = random_atoms(rng, d, 4);
    const SpherePoint eta = rng.direction(d);
    const double r = rng.uniform(0.0, ranges.r_max);
    std::vector<double> logs;
    std::vector<double> derivs;
    for (const AtomSpec& a : m.atoms()) {
      const KernelGeometry g = kernel_geometry(p, eta.coords(), r, a.point.coords());
      logs.push_back(std::log(a.weight) + log_kernel(p, g));
      derivs.push_back(kernel_log_derivative(p, g));
    }
    const double top = *std::max_element(logs.begin(), logs.end());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
      const double w = std::exp(logs[i] - top);
      num += w * derivs[i];
      den += w;
    }
    const double observed = num / den;
    const double a = p.a();
    const double b = p.b();
    Trial t;
    const double norm = 1.0 + std::abs(a) + std::abs(b);
    t.slack = std::min(observed + a + b * r, a - b * r - observed) / norm;
    t.violated = t.slack < -kBoundTolerance;
    t.payload = {{"params", params_to_json(p)}, {"r", r}, {"eta", point_json(eta.coords())},
                 {"measure", json::parse(measure_to_json(m))}, {"observed", observed},
                 {"slack", t.slack}};
    return t;
  }
  if (check == "envelope-forms") {
    const Field f = rng.uniform(0.0, 1.0) < 0.5 ? Field::real : Field::complex;
    KernelParams p;
    for (;;) {
      const int n = f == Field::real ? static_cast<int>(rng.uniform(2.0, 5.0))
                                     : static_cast<int>(rng.uniform(1.0, 4.0));
      p = KernelParams(f, n, rng.uniform(-6.0, 3.0));
      const double crit = f == Field::real ? -0.5 * n : -1.0 * n;
      if (std::abs(p.lambda - crit) > 1e-3) break;
    }
    double r1 = rng.uniform(0.0, ranges.r_max);
    double r2 = rng.uniform(0.0, ranges.r_max);
    if (r1 > r2) std::swap(r1, r2);
    const double u = std::exp(rng.uniform(-5.0, 5.0));
    const HarnackEnvelope e = harnack_envelope(p, u, r1, r2);
    Trial t;
    t.slack = 1e-12 - e.max_rel_diff;
    t.violated = t.slack < 0.0;
    t.payload = {{"params", params_to_json(p)}, {"r_prime", r1}, {"r", r2}, {"u_r_prime", u},
                 {"max_rel_diff", e.max_rel_diff}};
    return t;
  }
  if (check == "envelope") {
    const Field f = rng.uniform(0.0, 1.0) < 0.5 ? Field::real : Field::complex;
    const KernelParams p = f == Field::real
                               ? pick_params(rng, f, ranges, {2, 3}, {-3.0, -2.0, 0.0, 0.5, 2.0})
                               : pick_params(rng, f, ranges, {1, 2}, {-4.0, -2.5, 0.0, 1.0});
    const std::size_t d = p.sphere_dim();
    const MeasureSpec m = random_atoms(rng, d, 4);
    const SpherePoint zeta = rng.direction(d);
    double r1 = rng.uniform(0.0, ranges.r_max);
    double r2 = rng.uniform(0.0, ranges.r_max);
    if (r1 > r2) std::swap(r1, r2);
    const QuadratureRule rule = build_quadrature(d, 8, RuleKind::deterministic_product);
    const EnvelopeReport e = verify_envelope(p, m, zeta, r1, r2, rule);
    Trial t;
    t.slack = std::min(e.slack.first, e.slack.second);
    t.violated = !e.verdict;
    t.payload = {{"params", params_to_json(p)}, {"measure", json::parse(measure_to_json(m))},
                 {"zeta", point_json(zeta.coords())}, {"r_prime", r1}, {"r", r2},
                 {"lower", e.lower}, {"upper", e.upper}, {"observed", e.observed}};
    return t;
  }
  throw Error(ErrorKind::unknown_check, "unknown check '" + check + "'");
}

}  // namespace

const std::vector<std::string>& sweep_checks() {
  static const std::vector<std::string> names{"scalar-inequality",
                                              "real-derivative",
                                              "complex-derivative",
                                              "complex-derivative-reduced-exponent",
                                              "complex-derivative-halved-coefficient",
                                              "log-derivative",
                                              "envelope-forms",
                                              "envelope"};
  return names;
}

SweepSummary inequality_sweep(const std::string& check, std::size_t trials, std::uint64_t seed,
                              const SweepRanges& ranges) {
  const auto& names = sweep_checks();
  const auto it = std::find(names.begin(), names.end(), check);
  if (it == names.end()) throw Error(ErrorKind::unknown_check, "unknown check '" + check + "'");
  if (!(ranges.r_max > 0.0 && ranges.r_max < 1.0)) {
    throw Error(ErrorKind::argument, "r_max must lie in (0, 1)");
  }
  const auto stream = static_cast<std::uint64_t>(it - names.begin()) + 1;
  std::vector<Trial> results(trials);
  parallel::for_each_index(trials, [&](std::size_t i) {
    TrialRng rng(parallel::derive_seed(seed, stream, i));
    results[i] = run_trial(check, rng, ranges);
  });
  SweepSummary s;
  s.check = check;
  s.trials = trials;
  s.worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trials; ++i) {
    s.worst_slack = std::min(s.worst_slack, results[i].slack);
    if (!results[i].violated) continue;
    ++s.violations;
    if (s.counterexamples.size() < kMaxCounterexamples) {
      json c = results[i].payload;
      c["trial"] = i;
      s.counterexamples.push_back(std::move(c));
    }
  }
  if (trials == 0) s.worst_slack = 0.0;
  return s;
}

json sweep_summary_json(const SweepSummary& s) {
  json j;
  j["check"] = s.check;
  j["trials"] = s.trials;
  j["violations"] = s.violations;
  j["worst_slack"] = s.worst_slack;
  j["counterexamples"] = s.counterexamples;
  return j;
}

}  // namespace ihb
