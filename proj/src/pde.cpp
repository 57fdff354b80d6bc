#include "ihb/pde.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include "ihb/parallel.hpp"

namespace ihb {

namespace {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

void check_stencil(std::span<const double> x, double h) {
  if (!(h >= 1e-5 && h <= 1e-2)) {
    throw Error(ErrorKind::argument, "step h must lie in [1e-5, 1e-2]");
  }
  if (!(1.0 - std::sqrt(norm2(x)) >= 4.0 * h)) {
    throw Error(ErrorKind::stencil_domain,
                "stencil leaves the ball: the point must be at least 4h inside");
  }
}

class Stencil {
 public:
  Stencil(const FieldFn& f, std::span<const double> x, double h)
      : f_(f), x_(x.begin(), x.end()), h_(h), f0_(f(x)) {}

  double center() const { return f0_; }

  double first(std::size_t a) const {
    return (at(a, 1, a, 0) - at(a, -1, a, 0)) / (2.0 * h_);
  }

  double second(std::size_t a, std::size_t b) const {
    if (a == b) return (at(a, 1, a, 0) - 2.0 * f0_ + at(a, -1, a, 0)) / (h_ * h_);
    return (at(a, 1, b, 1) - at(a, 1, b, -1) - at(a, -1, b, 1) + at(a, -1, b, -1)) /
           (4.0 * h_ * h_);
  }

 private:
  double at(std::size_t a, int sa, std::size_t b, int sb) const {
    std::vector<double> y = x_;
    y[a] += sa * h_;
    y[b] += sb * h_;
    return f_(y);
  }

  const FieldFn& f_;
  std::vector<double> x_;
  double h_;
  double f0_;
};

}  // namespace

double apply_delta_lambda(const KernelParams& p, const FieldFn& f, std::span<const double> x,
                          double h) {
  require_field(p, Field::real, "apply_delta_lambda");
  if (x.size() != static_cast<std::size_t>(p.n)) {
    throw Error(ErrorKind::dimension_mismatch, "point dimension does not match n");
  }
  check_stencil(x, h);
  const Stencil st(f, x, h);
  double lap = 0.0;
  double euler = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    lap += st.second(j, j);
    euler += x[j] * st.first(j);
  }
  const double lam = p.lambda;
  const double s = 1.0 - norm2(x);
  return s * (0.25 * s * lap + lam * euler + lam * (0.5 * p.n - 1.0 - lam) * st.center());
}

double apply_delta_alpha(const KernelParams& p, const FieldFn& f, std::span<const double> z,
                         double h) {
  require_field(p, Field::complex, "apply_delta_alpha");
  const std::size_t n = static_cast<std::size_t>(p.n);
  if (z.size() != 2 * n) {
    throw Error(ErrorKind::dimension_mismatch, "point dimension does not match 2n");
  }
  check_stencil(z, h);
  using cd = std::complex<double>;
  const Stencil st(f, z, h);
  std::vector<cd> zc(n), d(n);
  for (std::size_t j = 0; j < n; ++j) {
    zc[j] = cd(z[2 * j], z[2 * j + 1]);
    // d/dz = (d/dx - i d/dy) / 2
    d[j] = 0.5 * cd(st.first(2 * j), -st.first(2 * j + 1));
  }
  cd second_order = 0.0;
  double magnitude = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t xi = 2 * i, yi = 2 * i + 1, xj = 2 * j, yj = 2 * j + 1;
      // d^2 f / dz_i dconj(z_j) = (f_xixj + f_yiyj + i (f_xiyj - f_yixj)) / 4
      const cd mixed = 0.25 * cd(st.second(xi, xj) + st.second(yi, yj),
                                 st.second(xi, yj) - st.second(yi, xj));
      const cd coef = (i == j ? 1.0 : 0.0) - zc[i] * std::conj(zc[j]);
      second_order += coef * mixed;
      magnitude += std::abs(coef) * std::abs(mixed);
    }
  }
  cd first_order = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    first_order += zc[j] * d[j] + std::conj(zc[j]) * std::conj(d[j]);
    magnitude += 2.0 * std::abs(p.lambda) * std::abs(zc[j]) * std::abs(d[j]);
  }
  const double a = p.lambda;
  const double s = 1.0 - norm2(z);
  const cd total = 4.0 * s * (second_order + a * first_order - a * a * st.center());
  magnitude = 4.0 * s * (magnitude + a * a * std::abs(st.center()));
  if (std::abs(total.imag()) > 1e-9 * std::max(1.0, magnitude)) {
    throw Error(ErrorKind::internal, "complex operator left an imaginary residue");
  }
  return total.real();
}

double apply_operator(const KernelParams& p, const FieldFn& f, std::span<const double> x,
                      double h) {
  return p.field == Field::real ? apply_delta_lambda(p, f, x, h) : apply_delta_alpha(p, f, x, h);
}

ResidualReport residual_report(const KernelParams& p, const MeasureSpec& m,
                               const QuadratureRule& rule, std::size_t sample_count,
                               std::uint64_t seed, double h) {
  if (sample_count == 0) throw Error(ErrorKind::argument, "sample_count must be positive");
  if (!(h >= 2e-5 && h <= 1e-2)) throw Error(ErrorKind::argument, "h must lie in [2e-5, 1e-2]");
  const std::size_t d = p.sphere_dim();
  ResidualReport rep;
  rep.params = p;
  rep.h = h;
  rep.samples = sample_count;
  rep.residuals.assign(sample_count, 0.0);
  std::vector<double> orders(sample_count, 0.0);
  std::vector<double> noise(sample_count, 0.0);
  parallel::for_each_index(sample_count, [&](std::size_t i) {
    std::mt19937_64 rng(parallel::derive_seed(seed, 7, i));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double radius = kResidualMaxRadius * unit(rng);
    const SpherePoint dir = sample_uniform(d, 1, rng())[0];
    std::vector<double> x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = radius * dir[j];
    double max_err = 0.0;
    const FieldFn u = [&](std::span<const double> y) {
      const Evaluation e = evaluate_u(p, m, BallPoint::from_cartesian(y), rule);
      max_err = std::max(max_err, e.error);
      return e.value;
    };
    const double u0 = std::abs(u(x));
    const double coarse = std::abs(apply_operator(p, u, x, h)) / u0;
    const double fine = std::abs(apply_operator(p, u, x, 0.5 * h)) / u0;
    rep.residuals[i] = coarse;
    orders[i] = coarse > 0.0 && fine > 0.0 ? std::log2(coarse / fine)
                                           : std::numeric_limits<double>::quiet_NaN();
    // Error of the differences from evaluation error alone, at step h/2.
    const double hh = 0.5 * h;
    const double s = 1.0 - radius * radius;
    const double scale = p.field == Field::real ? 1.0 : 4.0;
    noise[i] = scale * s *
               (s * static_cast<double>(d * d) / (hh * hh) + std::abs(p.lambda) * d / hh + 1.0 +
                p.lambda * p.lambda) *
               max_err / u0;
  });
  std::vector<double> sorted = rep.residuals;
  std::sort(sorted.begin(), sorted.end());
  rep.max_residual = sorted.back();
  rep.median_residual = sorted[sorted.size() / 2];
  std::erase_if(orders, [](double o) { return !std::isfinite(o); });
  std::sort(orders.begin(), orders.end());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rep.convergence_order_estimate = orders.empty() ? nan : orders[orders.size() / 2];
  rep.order_min = orders.empty() ? nan : orders.front();
  rep.order_max = orders.empty() ? nan : orders.back();
  rep.noise_floor = *std::max_element(noise.begin(), noise.end());
  rep.noise_dominated = rep.noise_floor > 0.1 * rep.median_residual;
  return rep;
}

json residual_report_json(const ResidualReport& r) {
  json j;
  j["params"] = params_to_json(r.params);
  j["h"] = r.h;
  j["samples"] = r.samples;
  j["max_residual"] = r.max_residual;
  j["median_residual"] = r.median_residual;
  j["convergence_order_estimate"] = r.convergence_order_estimate;
  j["order_range"] = {r.order_min, r.order_max};
  j["noise_floor"] = r.noise_floor;
  j["noise_dominated"] = r.noise_dominated;
  return j;
}

}  // namespace ihb
