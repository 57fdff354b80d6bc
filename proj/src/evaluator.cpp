#include "ihb/evaluator.hpp"

#include <cmath>

#include "ihb/parallel.hpp"

namespace ihb {

namespace {

void require_measure_dims(const KernelParams& p, const MeasureSpec& m, std::size_t point_dim) {
  const std::size_t d = p.sphere_dim();
  if (m.dim() != d || point_dim != d) {
    throw Error(ErrorKind::dimension_mismatch,
                "measure/point dimension does not match " + p.describe() + " (expected " +
                    std::to_string(d) + ")");
  }
}

double boundary_imag(const KernelParams& p, std::span<const double> eta,
                     std::span<const double> xi) {
  return p.field == Field::complex ? std::abs(hermitian(eta, xi).imag()) : 0.0;
}

}  // namespace

std::size_t base_order_for_level(std::size_t level) {
  return std::max<std::size_t>(2, level / 8);
}

LogKernel poisson_log_kernel(const KernelParams& p, double r, double gap_power) {
  LogKernel k;
  k.geometry = p.field;
  k.r = r;
  const double log_gap = std::log(1.0 - r);
  k.constant = p.boundary_exponent() * (log_gap + std::log1p(r));
  if (gap_power != 0.0) k.constant += gap_power * log_gap;
  k.power = p.distance_exponent();
  const double direct = std::pow((1.0 - r) * (1.0 + r), p.boundary_exponent()) *
                        (gap_power != 0.0 ? std::pow(1.0 - r, gap_power) : 1.0);
  k.factor = std::isnormal(direct) ? direct : 0.0;
  return k;
}

LogKernel potential_log_kernel(const KernelParams& p, double r) {
  require_field(p, Field::real, "potential U");
  LogKernel k;
  k.geometry = Field::real;
  k.r = r;
  k.power = p.distance_exponent();
  k.factor = 1.0;
  return k;
}

Evaluation integrate_measure(const KernelParams& p, const MeasureSpec& m,
                             std::span<const double> eta, const LogKernel& log_k,
                             const QuadratureRule& rule, const EvalOptions& opt) {
  require_measure_dims(p, m, eta.size());
  Evaluation out;
  double atoms = 0.0;
  for (const AtomSpec& a : m.atoms()) {
    const auto xi = std::span<const double>(a.point.coords());
    const double v = log_k.value(0.5 * chord2(eta, xi), boundary_imag(p, eta, xi));
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::overflow, "atom contribution exceeds the double range (" +
                                           p.describe() + ", r=" + std::to_string(log_k.r) +
                                           ")");
    }
    atoms += a.weight * v;
  }
  double density = 0.0;
  if (m.has_density()) {
    if (rule.dim != m.dim()) {
      throw Error(ErrorKind::dimension_mismatch,
                  "quadrature rule dimension does not match the measure");
    }
    const DensitySpec& g = *m.density();
    if (rule.kind == RuleKind::monte_carlo) {
      const Integral I = integrate(rule, [&](std::span<const double> xi) {
        return std::exp(log_k(0.5 * chord2(eta, xi), boundary_imag(p, eta, xi))) * g(xi);
      });
      density = I.value;
      out.error = I.std_error;
    } else {
      const AlignedGeometry geo(p, eta, g);
      const AlignedResult res =
          aligned_integral(geo, log_k.r, 1.0 - log_k.r, log_k,
                           base_order_for_level(rule.level), opt.rel_tol, opt.max_factor);
      density = res.value;
      out.error = res.error;
      out.low_confidence = res.low_confidence;
    }
  }
  out.value = atoms + density;
  return out;
}

Evaluation evaluate_u(const KernelParams& p, const MeasureSpec& m, const BallPoint& x,
                      const QuadratureRule& rule, const EvalOptions& opt) {
  return integrate_measure(p, m, x.direction().coords(), poisson_log_kernel(p, x.r()), rule,
                           opt);
}

Evaluation evaluate_u_scaled(const KernelParams& p, const MeasureSpec& m, const BallPoint& x,
                             double gap_power, const QuadratureRule& rule,
                             const EvalOptions& opt) {
  return integrate_measure(p, m, x.direction().coords(),
                           poisson_log_kernel(p, x.r(), gap_power), rule, opt);
}

Evaluation evaluate_potential_U(const KernelParams& p, const MeasureSpec& m,
                                const BallPoint& x, const QuadratureRule& rule,
                                const EvalOptions& opt) {
  return integrate_measure(p, m, x.direction().coords(), potential_log_kernel(p, x.r()), rule,
                           opt);
}

namespace {

RadialProfile profile_impl(const KernelParams& p, const MeasureSpec& m, const SpherePoint& zeta,
                           const std::vector<double>& r_grid, const QuadratureRule& rule,
                           const EvalOptions& opt, bool parallel) {
  require_measure_dims(p, m, zeta.dim());
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] >= 0.0 && r_grid[i] <= kProfileMaxR)) {
      throw Error(ErrorKind::argument, "profile grid must lie in [0, 1-1e-6]");
    }
    if (i > 0 && !(r_grid[i] > r_grid[i - 1])) {
      throw Error(ErrorKind::argument, "profile grid must be strictly increasing");
    }
  }
  RadialProfile prof;
  prof.params = p;
  prof.zeta = zeta;
  prof.r_grid = r_grid;
  const std::size_t n = r_grid.size();
  prof.u_values.assign(n, 0.0);
  prof.quadrature_error.assign(n, 0.0);
  std::vector<char> low(n, 0);
  auto body = [&](std::size_t i) {
    const Evaluation e = evaluate_u(p, m, BallPoint(r_grid[i], zeta), rule, opt);
    prof.u_values[i] = e.value;
    prof.quadrature_error[i] = e.error;
    low[i] = e.low_confidence ? 1 : 0;
  };
  if (parallel) {
    parallel::for_each_index(n, body);
  } else {
    parallel::for_each_index_serial(n, body);
  }
  prof.low_confidence.assign(low.begin(), low.end());
  return prof;
}

}  // namespace

RadialProfile radial_profile(const KernelParams& p, const MeasureSpec& m,
                             const SpherePoint& zeta, const std::vector<double>& r_grid,
                             const QuadratureRule& rule, const EvalOptions& opt) {
  return profile_impl(p, m, zeta, r_grid, rule, opt, true);
}

RadialProfile radial_profile_serial(const KernelParams& p, const MeasureSpec& m,
                                    const SpherePoint& zeta, const std::vector<double>& r_grid,
                                    const QuadratureRule& rule, const EvalOptions& opt) {
  return profile_impl(p, m, zeta, r_grid, rule, opt, false);
}

}  // namespace ihb
