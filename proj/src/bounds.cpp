#include "ihb/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ihb/io.hpp"
#include "ihb/parallel.hpp"

namespace ihb {

double log_phi(const KernelParams& p, double r) {
  return p.mass_exponent() * std::log(1.0 - r) - p.boundary_exponent() * std::log1p(r);
}

double log_psi(const KernelParams& p, double r) {
  return p.mass_exponent() * std::log1p(r) - p.boundary_exponent() * std::log(1.0 - r);
}

double phi(const KernelParams& p, double r) {
  const double v = std::pow(1.0 - r, p.mass_exponent()) / std::pow(1.0 + r, p.boundary_exponent());
  return std::isnormal(v) ? v : std::exp(log_phi(p, r));
}

double psi(const KernelParams& p, double r) {
  const double v = std::pow(1.0 + r, p.mass_exponent()) / std::pow(1.0 - r, p.boundary_exponent());
  return std::isnormal(v) ? v : std::exp(log_psi(p, r));
}

double phi_log_derivative(const KernelParams& p, double r) {
  return -p.mass_exponent() / (1.0 - r) - p.boundary_exponent() / (1.0 + r);
}

double psi_log_derivative(const KernelParams& p, double r) {
  return p.mass_exponent() / (1.0 + r) + p.boundary_exponent() / (1.0 - r);
}

MonotoneScan scan_monotone(const std::vector<double>& values, const std::vector<double>& rel_err,
                           bool increasing, double min_slack) {
  MonotoneScan s;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double a = values[i];
    const double b = values[i + 1];
    const double err = rel_err.empty() ? 0.0 : std::max(rel_err[i], rel_err[i + 1]);
    const double slack = std::max(min_slack, 10.0 * err);
    const double scale = std::max(std::abs(a), std::abs(b));
    const double margin = scale > 0.0 ? (increasing ? b - a : a - b) / scale : 0.0;
    s.worst_margin = std::min(s.worst_margin, margin);
    if (margin < -slack && s.verdict) {
      s.verdict = false;
      s.first_violation = i;
    }
  }
  return s;
}

namespace {

std::vector<double> relative_errors(const RadialProfile& prof) {
  std::vector<double> rel(prof.u_values.size());
  for (std::size_t i = 0; i < rel.size(); ++i) {
    rel[i] = prof.quadrature_error[i] / std::abs(prof.u_values[i]);
  }
  return rel;
}

MonotoneReport scan_pair(const KernelParams& p, std::vector<double> phi_u,
                         std::vector<double> psi_u, const RadialProfile& prof) {
  MonotoneReport rep;
  rep.phi_u = std::move(phi_u);
  rep.psi_u = std::move(psi_u);
  rep.phi_decreasing_expected = p.upper_regime();
  const std::vector<double> rel = relative_errors(prof);
  rep.phi = scan_monotone(rep.phi_u, rel, !rep.phi_decreasing_expected);
  rep.psi = scan_monotone(rep.psi_u, rel, rep.phi_decreasing_expected);
  rep.low_confidence =
      std::any_of(prof.low_confidence.begin(), prof.low_confidence.end(), [](bool b) { return b; });
  return rep;
}

}  // namespace

MonotoneReport monotone_profiles(const RadialProfile& profile) {
  const KernelParams& p = profile.params;
  require_nondegenerate(p, "monotone_profiles");
  const std::size_t n = profile.r_grid.size();
  std::vector<double> phi_u(n), psi_u(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = profile.r_grid[i];
    const double lu = std::log(profile.u_values[i]);
    phi_u[i] = std::exp(log_phi(p, r) + lu);
    psi_u[i] = std::exp(log_psi(p, r) + lu);
  }
  return scan_pair(p, std::move(phi_u), std::move(psi_u), profile);
}

LogDerivativeCheck log_derivative_bounds_check(const KernelParams& p, const MeasureSpec& m,
                                               const BallPoint& x, const QuadratureRule& rule,
                                               double h, double tol) {
  require_nondegenerate(p, "log_derivative_bounds_check");
  const double r = x.r();
  if (!(h > 1e-8 && h < (1.0 - r) / 10.0)) {
    throw Error(ErrorKind::argument, "step h must satisfy 1e-8 < h < (1-r)/10");
  }
  const SpherePoint& dir = x.direction();
  const SpherePoint back = dir.negated();
  auto at = [&](double t) {
    return evaluate_u(p, m, t >= 0.0 ? BallPoint(t, dir) : BallPoint(-t, back), rule);
  };
  const Evaluation u0 = at(r);
  const Evaluation up = at(r + h);
  const Evaluation um = at(r - h);
  const Evaluation up2 = at(r + 0.5 * h);
  const Evaluation um2 = at(r - 0.5 * h);
  const double d1 = (up.value - um.value) / (2.0 * h * u0.value);
  const double d2 = (up2.value - um2.value) / (h * u0.value);
  const double truncation = std::abs(d1 - d2) * 4.0 / 3.0;
  const double quadrature =
      (up.error + um.error) / (2.0 * h * u0.value) + std::abs(d1) * u0.error / u0.value;

  const double one_minus_r2 = (1.0 - r) * (1.0 + r);
  const double a = p.a();
  const double b = p.b();
  LogDerivativeCheck c;
  c.observed = d1;
  c.lower = -(a + b * r) / one_minus_r2;
  c.upper = (a - b * r) / one_minus_r2;
  c.slack_lower = (c.observed - c.lower) * one_minus_r2;
  c.slack_upper = (c.upper - c.observed) * one_minus_r2;
  c.tolerance = std::max(tol, 10.0 * (truncation + quadrature) * one_minus_r2);
  c.verdict = c.slack_lower >= -c.tolerance && c.slack_upper >= -c.tolerance;
  return c;
}

std::pair<double, double> generic_ray_bound(double a, double b, double f_rprime, double r_prime,
                                            double r) {
  if (!(r_prime >= 0.0 && r < 1.0)) throw Error(ErrorKind::domain, "need 0 <= r' <= r < 1");
  if (r_prime > r) throw Error(ErrorKind::argument, "generic_ray_bound requires r' <= r");
  if (!(f_rprime > 0.0)) throw Error(ErrorKind::argument, "f(r') must be positive");
  if (r_prime == r) return {f_rprime, f_rprime};
  const double lp = std::log1p(r) - std::log1p(r_prime);
  const double ls = std::log(1.0 - r) - std::log(1.0 - r_prime) + lp;
  const double lf = std::log(f_rprime);
  return {std::exp(-a * lp + 0.5 * (b + a) * ls + lf),
          std::exp(a * lp + 0.5 * (b - a) * ls + lf)};
}

HarnackEnvelope harnack_envelope(const KernelParams& p, double u_rprime, double r_prime,
                                 double r) {
  require_nondegenerate(p, "harnack_envelope");
  const auto [gl, gu] = generic_ray_bound(p.a(), p.b(), u_rprime, r_prime, r);
  const double q = p.boundary_exponent();
  const double m = p.mass_exponent();
  const double minus = (1.0 - r) / (1.0 - r_prime);
  const double plus = (1.0 + r) / (1.0 + r_prime);
  // Both fields share one closed-form shape: (minus)^q (plus)^-m and
  // (plus)^q (minus)^-m, swapped below the critical parameter.
  const double shrink = std::pow(minus, q) * std::pow(1.0 / plus, m) * u_rprime;
  const double grow = std::pow(plus, q) * std::pow(1.0 / minus, m) * u_rprime;
  HarnackEnvelope e;
  if (p.upper_regime()) {
    e.lower = shrink;
    e.upper = grow;
  } else {
    e.lower = grow;
    e.upper = shrink;
  }
  e.generic_lower = gl;
  e.generic_upper = gu;
  e.max_rel_diff =
      std::max(std::abs(e.lower - gl) / std::abs(gl), std::abs(e.upper - gu) / std::abs(gu));
  return e;
}

double collapsed_complex_lower_bound(const KernelParams& p, double u_rprime, double r_prime,
                                     double r) {
  require_field(p, Field::complex, "collapsed_complex_lower_bound");
  const double n = p.n;
  const double alpha = p.lambda;
  return std::pow((1.0 + r) / (1.0 + r_prime), -2.0 * n - 2.0 * alpha) *
         std::pow((1.0 - r * r) / (1.0 - r_prime * r_prime), n + 2.0 * alpha) * u_rprime;
}

EnvelopeReport verify_envelope(const KernelParams& p, const MeasureSpec& m,
                               const SpherePoint& zeta, double r_prime, double r,
                               const QuadratureRule& rule, const EvalOptions& opt) {
  const Evaluation ep = evaluate_u(p, m, BallPoint(r_prime, zeta), rule, opt);
  const Evaluation er = evaluate_u(p, m, BallPoint(r, zeta), rule, opt);
  const HarnackEnvelope env = harnack_envelope(p, ep.value, r_prime, r);
  EnvelopeReport rep;
  rep.r_prime = r_prime;
  rep.r = r;
  rep.lower = env.lower;
  rep.upper = env.upper;
  rep.observed = er.value;
  rep.tolerance = 10.0 * (ep.error / ep.value + er.error / er.value) + 1e-12;
  rep.slack = {(rep.observed - rep.lower) / rep.observed,
               (rep.upper - rep.observed) / rep.observed};
  rep.verdict = rep.slack.first >= -rep.tolerance && rep.slack.second >= -rep.tolerance;
  return rep;
}

namespace {

void require_scaled(const KernelParams& p, double R, double r) {
  require_field(p, Field::real, "radius-R scaling");
  if (!(R > 0.0)) throw Error(ErrorKind::argument, "R must be positive");
  if (!(r >= 0.0 && r < R)) throw Error(ErrorKind::domain, "need 0 <= r < R");
}

}  // namespace

double phi_scaled(const KernelParams& p, double R, double r) {
  require_scaled(p, R, r);
  const double n = p.n;
  const double lam = p.lambda;
  return std::exp(-(n - 2.0 - 2.0 * lam) * std::log(R) + (n - 1.0) * std::log(R - r) -
                  (1.0 + 2.0 * lam) * std::log(R + r));
}

double psi_scaled(const KernelParams& p, double R, double r) {
  require_scaled(p, R, r);
  const double n = p.n;
  const double lam = p.lambda;
  return std::exp(-(n - 2.0 - 2.0 * lam) * std::log(R) + (n - 1.0) * std::log(R + r) -
                  (1.0 + 2.0 * lam) * std::log(R - r));
}

MonotoneReport scaled_ball_profiles(const KernelParams& p, double R, const RadialProfile& profile) {
  require_nondegenerate(p, "scaled_ball_profiles");
  if (!(R > 0.0)) throw Error(ErrorKind::argument, "R must be positive");
  const std::size_t n = profile.r_grid.size();
  std::vector<double> phi_u(n), psi_u(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = profile.r_grid[i];
    phi_u[i] = phi_scaled(p, R, r) * profile.u_values[i];
    psi_u[i] = psi_scaled(p, R, r) * profile.u_values[i];
  }
  return scan_pair(p, std::move(phi_u), std::move(psi_u), profile);
}

std::pair<double, double> scaled_ball_envelope(const KernelParams& p, double R, double r,
                                               double u0) {
  require_nondegenerate(p, "scaled_ball_envelope");
  const double from_phi = phi_scaled(p, R, 0.0) / phi_scaled(p, R, r) * u0;
  const double from_psi = psi_scaled(p, R, 0.0) / psi_scaled(p, R, r) * u0;
  if (p.upper_regime()) return {from_psi, from_phi};
  return {from_phi, from_psi};
}

bool SphereExtremaReport::verdict() const {
  return std::all_of(comparisons.begin(), comparisons.end(),
                     [](const ExtremaComparison& c) { return c.verdict; });
}

namespace {

constexpr double kInvGolden = 0.6180339887498949;

// Orthonormal basis of the tangent space at `dir` (Gram-Schmidt on the axes).
std::vector<std::vector<double>> tangent_basis(const std::vector<double>& dir) {
  const std::size_t d = dir.size();
  std::vector<std::vector<double>> basis;
  for (std::size_t k = 0; k < d && basis.size() + 1 < d; ++k) {
    std::vector<double> v(d, 0.0);
    v[k] = 1.0;
    auto remove = [&](const std::vector<double>& u) {
      const double c = dot(v, u);
      for (std::size_t i = 0; i < d; ++i) v[i] -= c * u[i];
    };
    remove(dir);
    for (const auto& b : basis) remove(b);
    double norm = std::sqrt(dot(v, v));
    if (norm < 1e-6) continue;
    for (double& x : v) x /= norm;
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<double> rotate(const std::vector<double>& dir, const std::vector<double>& t,
                           double theta) {
  std::vector<double> out(dir.size());
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  for (std::size_t i = 0; i < dir.size(); ++i) out[i] = c * dir[i] + s * t[i];
  return SpherePoint(std::move(out)).coords();
}

struct ExtremumSearch {
  const KernelParams& p;
  const MeasureSpec& m;
  const QuadratureRule& rule;
  const EvalOptions& opt;
  double radius;
  double sign;  // +1 for max, -1 for min
  double max_error = 0.0;

  double f(const std::vector<double>& dir) {
    const Evaluation e = evaluate_u(p, m, BallPoint(radius, SpherePoint(dir)), rule, opt);
    max_error = std::max(max_error, e.error);
    return sign * e.value;
  }

  // Golden-section maximization of f along the great circle through dir
  // tangent to t, on [-delta, delta].
  std::pair<std::vector<double>, double> line(const std::vector<double>& dir,
                                              const std::vector<double>& t, double delta,
                                              double f_dir) {
    double lo = -delta;
    double hi = delta;
    double x1 = hi - kInvGolden * (hi - lo);
    double x2 = lo + kInvGolden * (hi - lo);
    double f1 = f(rotate(dir, t, x1));
    double f2 = f(rotate(dir, t, x2));
    for (int it = 0; it < 48; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kInvGolden * (hi - lo);
        f2 = f(rotate(dir, t, x2));
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kInvGolden * (hi - lo);
        f1 = f(rotate(dir, t, x1));
      }
    }
    const double best_x = f1 > f2 ? x1 : x2;
    const double best_f = std::max(f1, f2);
    if (best_f > f_dir) return {rotate(dir, t, best_x), best_f};
    return {dir, f_dir};
  }

  SphereExtremum run(std::size_t search_level, std::uint64_t seed) {
    const std::size_t d = m.dim();
    std::vector<std::vector<double>> cand;
    for (const SpherePoint& s : sample_uniform(d, search_level, seed)) cand.push_back(s.coords());
    for (const AtomSpec& a : m.atoms()) {
      cand.push_back(a.point.coords());
      cand.push_back(a.point.negated().coords());
    }
    if (m.density()) {
      cand.push_back(m.density()->axis().coords());
      cand.push_back(m.density()->axis().negated().coords());
    }
    std::vector<double> vals(cand.size());
    parallel::for_each_index(cand.size(), [&](std::size_t i) {
      vals[i] = sign * evaluate_u(p, m, BallPoint(radius, SpherePoint(cand[i])), rule, opt).value;
    });
    std::vector<std::size_t> order(cand.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
    const double spacing =
        2.0 * std::numbers::pi /
        std::pow(static_cast<double>(search_level), 1.0 / static_cast<double>(d - 1));
    SphereExtremum best;
    double best_f = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < std::min<std::size_t>(3, order.size()); ++c) {
      std::vector<double> dir = cand[order[c]];
      double fd = vals[order[c]];
      double delta = std::min(std::numbers::pi / 2.0, 2.0 * spacing);
      double before_last = fd;
      for (int sweep = 0; sweep < 4; ++sweep) {
        before_last = fd;
        for (const auto& t : tangent_basis(dir)) {
          auto [nd, nf] = line(dir, t, delta, fd);
          dir = std::move(nd);
          fd = nf;
        }
        delta *= 0.5;
      }
      if (fd > best_f) {
        best_f = fd;
        best.direction = dir;
        best.gap = std::abs(fd - before_last);
      }
    }
    best.value = sign * best_f;
    return best;
  }
};

}  // namespace

SphereExtremaReport sphere_extrema_bounds(const KernelParams& p, const MeasureSpec& m,
                                          double r_prime, double r, const QuadratureRule& rule,
                                          std::size_t search_level, std::uint64_t seed,
                                          const EvalOptions& opt) {
  require_nondegenerate(p, "sphere_extrema_bounds");
  if (!(r_prime >= 0.0 && r_prime <= r && r < 1.0)) {
    throw Error(ErrorKind::argument, "need 0 <= r' <= r < 1");
  }
  if (search_level == 0) throw Error(ErrorKind::argument, "search_level must be positive");
  SphereExtremaReport rep;
  double qerr = 0.0;
  auto search = [&](double radius, double sign, std::uint64_t s) {
    ExtremumSearch es{p, m, rule, opt, radius, sign};
    SphereExtremum e = es.run(search_level, s);
    qerr = std::max(qerr, es.max_error);
    return e;
  };
  rep.max_r = search(r, 1.0, parallel::derive_seed(seed, 1, 0));
  rep.min_r = search(r, -1.0, parallel::derive_seed(seed, 1, 1));
  rep.max_rp = search(r_prime, 1.0, parallel::derive_seed(seed, 1, 2));
  rep.min_rp = search(r_prime, -1.0, parallel::derive_seed(seed, 1, 3));
  rep.quadrature_error = qerr;

  auto compare = [&](const std::string& name, double fac_r, const SphereExtremum& at_r,
                     double fac_rp, const SphereExtremum& at_rp, bool less_equal) {
    ExtremaComparison c;
    c.name = name;
    c.left = fac_r * at_r.value;
    c.right = fac_rp * at_rp.value;
    c.less_equal = less_equal;
    c.tolerance = 10.0 * ((at_r.gap + qerr) / at_r.value + (at_rp.gap + qerr) / at_rp.value) +
                  1e-12;
    const double scale = std::max(std::abs(c.left), std::abs(c.right));
    const double margin = (less_equal ? c.right - c.left : c.left - c.right) / scale;
    c.verdict = margin >= -c.tolerance;
    rep.comparisons.push_back(c);
  };
  if (p.upper_regime()) {
    compare("phi_max_nonincreasing", phi(p, r), rep.max_r, phi(p, r_prime), rep.max_rp, true);
    compare("psi_min_nondecreasing", psi(p, r), rep.min_r, psi(p, r_prime), rep.min_rp, false);
  } else {
    compare("psi_max_nonincreasing", psi(p, r), rep.max_r, psi(p, r_prime), rep.max_rp, true);
    compare("phi_min_nondecreasing", phi(p, r), rep.min_r, phi(p, r_prime), rep.min_rp, false);
  }
  return rep;
}

PhiShape phi_shape_diagnostic(const KernelParams& p) {
  PhiShape s;
  // phi'/phi = -(A + B r)/(1 - r^2), zero at r* = -A/B.
  double A, B;
  if (p.field == Field::real) {
    A = p.n + 2.0 * p.lambda;
    B = p.n - 2.0 * p.lambda - 2.0;
  } else {
    A = 2.0 * p.n + 2.0 * p.lambda;
    B = -2.0 * p.lambda;
  }
  if (!p.upper_regime() && !p.degenerate() && B != 0.0) {
    const double rs = -A / B;
    if (rs > 0.0 && rs < 1.0) s.critical_r = rs;
  }
  for (int i = 1; i < 1000; ++i) {
    const double r = i / 1000.0;
    const double d = phi_log_derivative(p, r);
    if (s.critical_r) {
      const double rs = *s.critical_r;
      if (r < rs - 1e-9 && !(d > 0.0)) s.sign_pattern_ok = false;
      if (r > rs + 1e-9 && !(d < 0.0)) s.sign_pattern_ok = false;
    } else if (!(d <= 0.0)) {
      s.sign_pattern_ok = false;
    }
  }
  return s;
}

std::string profile_csv(const RadialProfile& profile) {
  std::string out = "r,u,phi_u,psi_u,err\n";
  for (std::size_t i = 0; i < profile.r_grid.size(); ++i) {
    const double r = profile.r_grid[i];
    const double u = profile.u_values[i];
    out += format_double(r) + ',' + format_double(u) + ',' +
           format_double(phi(profile.params, r) * u) + ',' +
           format_double(psi(profile.params, r) * u) + ',' +
           format_double(profile.quadrature_error[i]) + '\n';
  }
  return out;
}

}  // namespace ihb
