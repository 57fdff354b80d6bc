#include "ihb/kernels.hpp"

#include <cmath>
#include <sstream>

namespace ihb {

namespace {

constexpr double kLogMax = 709.78;

void require_dims(const KernelParams& p, std::size_t a, std::size_t b) {
  const std::size_t d = p.sphere_dim();
  if (a != d || b != d) {
    throw Error(ErrorKind::dimension_mismatch,
                "expected points in R^" + std::to_string(d) + " for " + p.describe());
  }
}

BoundCheck make_check(double g, double lower, double upper, double scale, double a,
                      double b) {
  BoundCheck c;
  c.slack_lower = g - lower;
  c.slack_upper = upper - g;
  const double tol = kBoundTolerance * (1.0 + std::abs(a) + std::abs(b));
  c.verdict = c.slack_lower >= -tol && c.slack_upper >= -tol;
  c.lower = lower * scale;
  c.upper = upper * scale;
  c.observed = g * scale;
  return c;
}

}  // namespace

const char* to_string(Field f) { return f == Field::real ? "real" : "complex"; }

KernelParams::KernelParams(Field f, int n_, double lambda_) : field(f), n(n_), lambda(lambda_) {
  if (field == Field::real && n < 2) {
    throw Error(ErrorKind::invalid_dimension, "real ball requires n >= 2");
  }
  if (field == Field::complex && n < 1) {
    throw Error(ErrorKind::invalid_dimension, "complex ball requires n >= 1");
  }
  if (!std::isfinite(lambda)) throw Error(ErrorKind::validation, "lambda must be finite");
}

std::size_t KernelParams::sphere_dim() const {
  return field == Field::real ? static_cast<std::size_t>(n) : 2 * static_cast<std::size_t>(n);
}

bool KernelParams::degenerate() const {
  return field == Field::real ? 2.0 * lambda == -static_cast<double>(n)
                              : lambda == -static_cast<double>(n);
}

bool KernelParams::upper_regime() const {
  return field == Field::real ? 2.0 * lambda > -static_cast<double>(n)
                              : lambda > -static_cast<double>(n);
}

double KernelParams::a() const {
  const double base = distance_exponent();
  return upper_regime() ? base : -base;
}

double KernelParams::b() const {
  return field == Field::real ? -n + 2.0 * lambda + 2.0 : 2.0 * lambda;
}

double KernelParams::boundary_exponent() const {
  return field == Field::real ? 1.0 + 2.0 * lambda : n + 2.0 * lambda;
}

double KernelParams::distance_exponent() const {
  return field == Field::real ? n + 2.0 * lambda : 2.0 * n + 2.0 * lambda;
}

double KernelParams::mass_exponent() const {
  return field == Field::real ? n - 1.0 : static_cast<double>(n);
}

std::string KernelParams::describe() const {
  std::ostringstream os;
  os << to_string(field) << " n=" << n << (field == Field::real ? " lambda=" : " alpha=")
     << lambda;
  return os.str();
}

void require_field(const KernelParams& p, Field f, const char* what) {
  if (p.field != f) {
    throw Error(ErrorKind::unsupported_parameter,
                std::string(what) + " requires the " + to_string(f) + " field");
  }
}

void require_nondegenerate(const KernelParams& p, const char* what) {
  if (p.degenerate()) {
    throw Error(ErrorKind::unsupported_parameter,
                std::string(what) + " is undefined at the degenerate parameter (" +
                    p.describe() + ")");
  }
}

std::complex<double> hermitian(std::span<const double> z, std::span<const double> w) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t j = 0; j + 1 < z.size(); j += 2) {
    const double a = z[j], b = z[j + 1], c = w[j], d = w[j + 1];
    // (a + ib)(c - id)
    re += a * c + b * d;
    im += b * c - a * d;
  }
  return {re, im};
}

KernelGeometry kernel_geometry(const KernelParams& p, std::span<const double> eta, double r,
                               std::span<const double> zeta) {
  require_dims(p, eta.size(), zeta.size());
  KernelGeometry g;
  g.r = r;
  g.omr = 0.5 * chord2(eta, zeta);
  if (p.field == Field::complex) g.im = hermitian(eta, zeta).imag();
  return g;
}

double kernel_distance2(const KernelParams& p, const KernelGeometry& g) {
  const double h = 1.0 - g.r;
  if (p.field == Field::real) return h * h + 2.0 * g.r * g.omr;
  const double re = h + g.r * g.omr;
  return re * re + g.r * g.r * g.im * g.im;
}

double log_kernel(const KernelParams& p, const KernelGeometry& g) {
  if (!(g.r >= 0.0 && g.r < 1.0)) throw Error(ErrorKind::domain, "r must be < 1");
  const double log_one_minus_r2 = std::log(1.0 - g.r) + std::log1p(g.r);
  const double value = p.boundary_exponent() * log_one_minus_r2 -
                       0.5 * p.distance_exponent() * std::log(kernel_distance2(p, g));
  if (value > kLogMax) {
    throw Error(ErrorKind::overflow, "kernel value exceeds the double range at r=" +
                                         std::to_string(g.r) + " (" + p.describe() + ")");
  }
  return value;
}

double kernel_value(const KernelParams& p, const KernelGeometry& g) {
  if (!(g.r >= 0.0 && g.r < 1.0)) throw Error(ErrorKind::domain, "r must be < 1");
  const double direct = std::pow((1.0 - g.r) * (1.0 + g.r), p.boundary_exponent()) *
                        std::pow(kernel_distance2(p, g), -0.5 * p.distance_exponent());
  if (std::isnormal(direct)) return direct;
  return std::exp(log_kernel(p, g));
}

double kernel_log_derivative(const KernelParams& p, const KernelGeometry& g) {
  const double r = g.r;
  const double one_minus_r2 = (1.0 - r) * (1.0 + r);
  const double d2 = kernel_distance2(p, g);
  if (p.field == Field::real) {
    // r - eta.zeta = omr - (1 - r)
    return -2.0 * p.boundary_exponent() * r -
           p.distance_exponent() * (g.omr - (1.0 - r)) * one_minus_r2 / d2;
  }
  const double re_w = 1.0 - g.omr;
  const double abs_w2 = re_w * re_w + g.im * g.im;
  return -2.0 * p.boundary_exponent() * r -
         p.distance_exponent() * (r * abs_w2 - re_w) * one_minus_r2 / d2;
}

double poisson_real(const KernelParams& p, const BallPoint& x, const SpherePoint& zeta) {
  require_field(p, Field::real, "poisson_real");
  return kernel_value(p, kernel_geometry(p, x.direction().coords(), x.r(), zeta.coords()));
}

double poisson_complex(const KernelParams& p, const BallPoint& z, const SpherePoint& zeta) {
  require_field(p, Field::complex, "poisson_complex");
  return kernel_value(p, kernel_geometry(p, z.direction().coords(), z.r(), zeta.coords()));
}

double poisson(const KernelParams& p, const BallPoint& x, const SpherePoint& zeta) {
  return kernel_value(p, kernel_geometry(p, x.direction().coords(), x.r(), zeta.coords()));
}

namespace {

double radial_derivative(const KernelParams& p, const BallPoint& x, const SpherePoint& zeta) {
  const KernelGeometry g = kernel_geometry(p, x.direction().coords(), x.r(), zeta.coords());
  const double one_minus_r2 = (1.0 - g.r) * (1.0 + g.r);
  return kernel_value(p, g) * kernel_log_derivative(p, g) / one_minus_r2;
}

}  // namespace

double kernel_radial_derivative_real(const KernelParams& p, const BallPoint& x,
                                     const SpherePoint& zeta) {
  require_field(p, Field::real, "kernel_radial_derivative_real");
  return radial_derivative(p, x, zeta);
}

double kernel_radial_derivative_complex(const KernelParams& p, const BallPoint& z,
                                        const SpherePoint& zeta) {
  require_field(p, Field::complex, "kernel_radial_derivative_complex");
  return radial_derivative(p, z, zeta);
}

BoundCheck real_derivative_bounds(const KernelParams& p, const BallPoint& x, const SpherePoint& zeta) {
  require_field(p, Field::real, "real_derivative_bounds");
  require_nondegenerate(p, "real_derivative_bounds");
  const KernelGeometry g = kernel_geometry(p, x.direction().coords(), x.r(), zeta.coords());
  const double r = g.r;
  const double a = p.a();
  const double b = p.b();
  const double scale = kernel_value(p, g) / ((1.0 - r) * (1.0 + r));
  return make_check(kernel_log_derivative(p, g), -(a + b * r), a - b * r, scale, a, b);
}

BoundCheck complex_derivative_bounds(const KernelParams& p, const BallPoint& z, const SpherePoint& zeta,
                          ComplexBoundForm form) {
  require_field(p, Field::complex, "complex_derivative_bounds");
  require_nondegenerate(p, "complex_derivative_bounds");
  const KernelGeometry g = kernel_geometry(p, z.direction().coords(), z.r(), zeta.coords());
  const double r = g.r;
  double a = p.a();
  const double b = p.b();
  double factor = 1.0;
  if (form == ComplexBoundForm::halved_coefficient) {
    const double half = p.n + 2.0 * p.lambda;
    a = p.upper_regime() ? half : -half;
  } else if (form == ComplexBoundForm::reduced_exponent) {
    // |1 - z.conj(zeta)|^{-(n+2a)} = |.|^{-(2n+2a)} * |.|^{n}
    factor = std::pow(kernel_distance2(p, g), 0.5 * p.n);
  }
  const double scale = kernel_value(p, g) / ((1.0 - r) * (1.0 + r));
  return make_check(kernel_log_derivative(p, g), -(a + b * r) * factor, (a - b * r) * factor,
                    scale, a, b);
}

ScalarInequality scalar_inequality(std::complex<double> a, double r) {
  if (std::abs(a) > 1.0 + 1e-12) throw Error(ErrorKind::domain, "scalar_inequality requires |a| <= 1");
  if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorKind::domain, "scalar_inequality requires r in [0,1]");
  const double a2 = std::norm(a);
  ScalarInequality s;
  s.slack_first = 1.0 + r * a2 - (1.0 + r) * a.real();
  s.slack_second = 1.0 - r * a2 - (r - 1.0) * a.real();
  s.first = s.slack_first >= -1e-12;
  s.second = s.slack_second >= -1e-12;
  return s;
}

}  // namespace ihb
