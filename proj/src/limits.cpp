#include "ihb/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ihb/parallel.hpp"

namespace ihb {

const char* to_string(LimitKind k) {
  return k == LimitKind::mass ? "mass-limit" : "potential-limit";
}

const char* to_string(LimitClass c) { return c == LimitClass::finite ? "finite" : "divergent"; }

namespace {

constexpr double kDivergenceThreshold = 1e8;

bool at_point(const AtomSpec& a, const SpherePoint& zeta) {
  return distance(a.point, zeta) <= kAtomMatchDistance;
}

// log |1 - <zeta, xi>|^2 (complex) or log |zeta - xi|^2 (real distance).
double log_boundary_distance2(Field geometry, const SpherePoint& zeta, const SpherePoint& xi) {
  if (geometry == Field::real) return std::log(chord2(zeta.coords(), xi.coords()));
  const std::complex<double> w = hermitian(zeta.coords(), xi.coords());
  const double omr = 0.5 * chord2(zeta.coords(), xi.coords());
  return std::log(omr * omr + w.imag() * w.imag());
}

// Whether int g(xi) / dist^p converges near zeta, where the density vanishes to
// order m there. `isotropic` selects the Euclidean distance on S^{d-1}.
bool density_converges(const KernelParams& p, const MeasureSpec& m, const SpherePoint& zeta,
                       bool isotropic) {
  const std::optional<int> order = m.density()->vanishing_order(zeta);
  if (!order) return true;
  const double mo = *order;
  const double pw = p.distance_exponent();
  if (p.field == Field::real || isotropic) {
    return pw < static_cast<double>(m.dim()) - 1.0 + mo;
  }
  if (p.n == 1) return pw < 1.0 + mo;
  return pw < p.n + 0.5 * mo;
}

// Target integral part from a density: 2^q int g(xi) / D(zeta, xi)^{p/2}.
Evaluation density_target(const KernelParams& p, const MeasureSpec& m, const SpherePoint& zeta,
                          Field geometry, const QuadratureRule& rule, const EvalOptions& opt) {
  const MeasureSpec dens(m.dim(), {}, m.density(), false);
  LogKernel k;
  k.geometry = geometry;
  k.r = 1.0;
  k.constant = p.boundary_exponent() * std::numbers::ln2;
  k.power = p.distance_exponent();
  k.factor = std::pow(2.0, p.boundary_exponent());
  return integrate_measure(p, dens, zeta.coords(), k, rule, opt);
}

std::optional<double> potential_target_impl(const KernelParams& p, const MeasureSpec& m,
                                            const SpherePoint& zeta, const QuadratureRule& rule,
                                            Field geometry, bool isotropic,
                                            const EvalOptions& opt) {
  require_nondegenerate(p, "potential limit");
  const double q = p.boundary_exponent();
  const double pw = p.distance_exponent();
  double total = 0.0;
  for (const AtomSpec& a : m.atoms()) {
    if (at_point(a, zeta)) {
      if (pw > 0.0) return std::nullopt;
      continue;  // |zeta - xi|^{-p} -> 0 for p < 0
    }
    total += a.weight * std::exp(q * std::numbers::ln2 -
                                 0.5 * pw * log_boundary_distance2(geometry, zeta, a.point));
  }
  if (m.has_density()) {
    if (!density_converges(p, m, zeta, isotropic)) return std::nullopt;
    total += density_target(p, m, zeta, geometry, rule, opt).value;
  }
  return total;
}

struct Rung {
  double value = 0.0;
  bool overflow = false;
  bool low_confidence = false;
};

// Error exponents of g(t) - limit, in powers of t = 1 - r, for the mass-limit
// normalization; the potential normalization shifts them by -p.
std::vector<double> mass_error_exponents(const KernelParams& p, const MeasureSpec& m,
                                         const SpherePoint& zeta) {
  const double pw = p.distance_exponent();
  std::vector<double> e;
  for (int j = 0; j <= 4; ++j) e.push_back(j);
  bool off = m.has_density();
  for (const AtomSpec& a : m.atoms()) off = off || !at_point(a, zeta);
  if (off) {
    for (int j = 0; j <= 3; ++j) e.push_back(pw + j);
  }
  if (m.has_density()) {
    const std::optional<int> order = m.density()->vanishing_order(zeta);
    const double mo = order.value_or(0);
    double base;
    double step = 1.0;
    if (p.field == Field::real) {
      base = p.n - 1.0 + mo;
    } else if (p.n == 1) {
      base = 1.0 + mo;
    } else {
      base = p.n + 0.5 * mo;
      step = 0.5;
    }
    for (int j = 0; j <= 6; ++j) e.push_back(base + step * j);
  }
  return e;
}

bool growth_evident(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n >= 4 && v[n - 1] > kDivergenceThreshold && v[n - 1] > v[n - 2] && v[n - 2] > v[n - 3] &&
      v[n - 3] > v[n - 4]) {
    return true;
  }
  // Power-law growth t^{-s}: log increments settle at s ln 2 instead of
  // shrinking geometrically as they do for a convergent sequence.
  if (n < 8) return false;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = n - 8; i + 1 < n; ++i) {
    if (!(v[i] > 0.0 && v[i + 1] > 0.0)) return false;
    const double d = std::log(v[i + 1]) - std::log(v[i]);
    if (!(d > 1e-4)) return false;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return lo > 0.9 * hi;
}

LimitReport run_ladder(LimitKind kind, const KernelParams& p, const MeasureSpec& m,
                       const SpherePoint& zeta, const QuadratureRule& rule,
                       const LadderOptions& opt) {
  require_nondegenerate(p, kind == LimitKind::mass ? "limit_mass" : "limit_potential");
  if (m.dim() != p.sphere_dim() || zeta.dim() != p.sphere_dim()) {
    throw Error(ErrorKind::dimension_mismatch, "zeta/measure dimension does not match " +
                                                   p.describe());
  }
  if (opt.k_min < 1 || opt.k_max < opt.k_min + 3 || opt.k_extend > 52) {
    throw Error(ErrorKind::argument, "ladder needs 1 <= k_min, k_max >= k_min + 3, k <= 52");
  }
  const double gap_power =
      kind == LimitKind::mass ? p.mass_exponent() : -p.boundary_exponent();

  LimitReport rep;
  rep.kind = kind;
  rep.params = p;
  rep.zeta = zeta;

  std::vector<Rung> rungs;
  auto extend = [&](int k_from, int k_to) {
    const std::size_t count = static_cast<std::size_t>(k_to - k_from + 1);
    std::vector<Rung> chunk(count);
    parallel::for_each_index(count, [&](std::size_t i) {
      const double r = 1.0 - std::ldexp(1.0, -(k_from + static_cast<int>(i)));
      try {
        const Evaluation e =
            evaluate_u_scaled(p, m, BallPoint(r, zeta), gap_power, rule, opt.eval);
        chunk[i].value = e.value;
        chunk[i].low_confidence = e.low_confidence;
        chunk[i].overflow = !std::isfinite(e.value);
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::overflow) throw;
        chunk[i].overflow = true;
      }
    });
    rungs.insert(rungs.end(), chunk.begin(), chunk.end());
  };
  auto values = [&] {
    std::vector<double> v;
    for (const Rung& g : rungs) {
      if (g.overflow) break;
      v.push_back(g.value);
    }
    return v;
  };
  auto settled = [&](const std::vector<double>& v) {
    if (v.size() < rungs.size() || growth_evident(v)) return true;
    const std::size_t n = v.size();
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    return std::abs(v[n - 1] - v[n - 2]) <= 1e-14 * scale;
  };

  extend(opt.k_min, opt.k_max);
  int k = opt.k_max;
  std::vector<double> v = values();
  while (!settled(v) && k < opt.k_extend) {
    const int next = std::min(k + 6, opt.k_extend);
    extend(k + 1, next);
    k = next;
    v = values();
  }

  rep.overflowed = v.size() < rungs.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    rep.r_sequence.push_back(1.0 - std::ldexp(1.0, -(opt.k_min + static_cast<int>(i))));
    rep.values.push_back(v[i]);
    rep.numerical_estimate_only = rep.numerical_estimate_only || rungs[i].low_confidence;
  }

  const bool divergent = rep.overflowed || growth_evident(v);
  rep.classification = divergent ? LimitClass::divergent : LimitClass::finite;
  if (!divergent && v.size() >= 2) {
    std::vector<double> e = mass_error_exponents(p, m, zeta);
    if (kind == LimitKind::potential) {
      for (double& x : e) x -= p.distance_exponent();
    }
    std::vector<double> use;
    std::sort(e.begin(), e.end());
    for (double x : e) {
      if (x > 1e-9 && (use.empty() || x - use.back() > 1e-9)) use.push_back(x);
      if (use.size() == 3) break;
    }
    use.resize(std::min(use.size(), v.size() - 1));
    const std::vector<double> tail(v.end() - static_cast<std::ptrdiff_t>(use.size() + 1),
                                   v.end());
    const auto [est, err] = richardson(tail, use);
    rep.estimate = est;
    rep.estimate_error = err;
  }

  if (kind == LimitKind::mass) {
    rep.target = mass_limit_target(p, m, zeta, rule);
  } else {
    rep.target = potential_target_impl(p, m, zeta, rule, p.field, false, opt.eval);
    if (p.field == Field::complex) {
      rep.statement_target = potential_target_impl(p, m, zeta, rule, Field::real, true, opt.eval);
    }
  }
  rep.target_classification = rep.target ? LimitClass::finite : LimitClass::divergent;
  if (rep.estimate && rep.target) {
    double scale = std::abs(*rep.target);
    for (double x : rep.values) scale = std::max(scale, std::abs(x));
    rep.rel_gap = scale > 0.0 ? std::abs(*rep.estimate - *rep.target) / scale : 0.0;
  }
  return rep;
}

}  // namespace

std::pair<double, double> richardson(const std::vector<double>& g,
                                     const std::vector<double>& exponents) {
  if (g.size() < exponents.size() + 1) {
    throw Error(ErrorKind::argument, "richardson needs one more value than exponents");
  }
  std::vector<double> t(g.end() - static_cast<std::ptrdiff_t>(exponents.size() + 1), g.end());
  double change = 0.0;
  for (double e : exponents) {
    const double f = std::exp2(e);
    const double before = t.back();
    for (std::size_t j = 0; j + 1 < t.size(); ++j) t[j] = (f * t[j + 1] - t[j]) / (f - 1.0);
    t.pop_back();
    change = std::abs(t.back() - before);
  }
  return {t.back(), change};
}

bool density_potential_converges(const KernelParams& p, const MeasureSpec& m,
                                 const SpherePoint& zeta) {
  if (!m.has_density()) return true;
  return density_converges(p, m, zeta, false);
}

std::optional<double> mass_limit_target(const KernelParams& p, const MeasureSpec& m,
                                        const SpherePoint& zeta, const QuadratureRule& rule) {
  require_nondegenerate(p, "mass limit");
  const double w = atom_mass_at(m, zeta);
  if (!p.upper_regime() && complement_mass_positive(m, zeta, rule)) return std::nullopt;
  return std::exp2(p.boundary_exponent()) * w;
}

std::optional<double> potential_limit_target(const KernelParams& p, const MeasureSpec& m,
                                             const SpherePoint& zeta,
                                             const QuadratureRule& rule) {
  return potential_target_impl(p, m, zeta, rule, p.field, false, EvalOptions{});
}

LimitReport limit_mass(const KernelParams& p, const MeasureSpec& m, const SpherePoint& zeta,
                       const QuadratureRule& rule, const LadderOptions& opt) {
  return run_ladder(LimitKind::mass, p, m, zeta, rule, opt);
}

LimitReport limit_potential(const KernelParams& p, const MeasureSpec& m,
                            const SpherePoint& zeta, const QuadratureRule& rule,
                            const LadderOptions& opt) {
  return run_ladder(LimitKind::potential, p, m, zeta, rule, opt);
}

json limit_report_json(const LimitReport& r) {
  auto num_or_div = [](const std::optional<double>& x) -> json {
    if (x) return *x;
    return "divergent";
  };
  json j;
  j["kind"] = to_string(r.kind);
  j["params"] = params_to_json(r.params);
  j["zeta"] = vector_to_json(r.zeta.coords());
  j["r_sequence"] = vector_to_json(r.r_sequence);
  j["values"] = vector_to_json(r.values);
  j["estimate"] = num_or_div(r.estimate);
  j["estimate_error"] = r.estimate_error;
  j["target"] = num_or_div(r.target);
  if (r.kind == LimitKind::potential && r.params.field == Field::complex) {
    j["statement_target"] = num_or_div(r.statement_target);
  }
  j["classification"] = to_string(r.classification);
  j["target_classification"] = to_string(r.target_classification);
  j["rel_gap"] = r.rel_gap ? json(*r.rel_gap) : json(nullptr);
  j["overflowed"] = r.overflowed;
  j["numerical_estimate_only"] = r.numerical_estimate_only;
  return j;
}

}  // namespace ihb
