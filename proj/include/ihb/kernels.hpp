#pragma once

#include <complex>
#include <string>

#include "ihb/geometry.hpp"

namespace ihb {

enum class Field { real, complex };

const char* to_string(Field f);

/// Kernel family and parameter. For the complex field `lambda` holds alpha and
/// points live in R^{2n} as interleaved (re_1, im_1, ..., re_n, im_n).
struct KernelParams {
  Field field = Field::real;
  int n = 2;
  double lambda = 0.0;

  KernelParams() = default;
  KernelParams(Field field, int n, double lambda);

  /// Ambient real dimension d of the boundary sphere S^{d-1}.
  std::size_t sphere_dim() const;
  /// lambda = -n/2 (real) or alpha = -n (complex): constant kernel.
  bool degenerate() const;
  /// lambda > -n/2 (real) or alpha > -n (complex).
  bool upper_regime() const;

  /// Ray-bound constants: u'/u lies in [-(a+br), a-br] / (1-r^2).
  double a() const;
  double b() const;

  /// Power of (1 - |x|^2) in the kernel: 1+2lambda or n+2alpha.
  double boundary_exponent() const;
  /// Power of the distance in the kernel denominator: n+2lambda or 2n+2alpha.
  double distance_exponent() const;
  /// Power of (1 - r) in the mass limit: n-1 (real) or n (complex).
  double mass_exponent() const;

  std::string describe() const;
};

void require_field(const KernelParams& p, Field f, const char* what);
void require_nondegenerate(const KernelParams& p, const char* what);

/// Position of a ball point relative to a boundary point, in a form that
/// keeps every kernel evaluation accurate as r -> 1:
///   omr = 1 - Re<eta, zeta> = |eta - zeta|^2 / 2, im = Im of the Hermitian
///   product (zero for the real field).
struct KernelGeometry {
  double r = 0.0;
  double omr = 0.0;
  double im = 0.0;
};

KernelGeometry kernel_geometry(const KernelParams& p, std::span<const double> eta, double r,
                               std::span<const double> zeta);

/// Squared kernel denominator base: |x - zeta|^2 (real) or |1 - z.conj(zeta)|^2.
double kernel_distance2(const KernelParams& p, const KernelGeometry& g);

/// log P; throws ErrorKind::overflow if P exceeds the double range.
double log_kernel(const KernelParams& p, const KernelGeometry& g);
double kernel_value(const KernelParams& p, const KernelGeometry& g);

/// (1 - r^2) * dP/dr / P, the normalized radial log-derivative.
double kernel_log_derivative(const KernelParams& p, const KernelGeometry& g);

double poisson_real(const KernelParams& p, const BallPoint& x, const SpherePoint& zeta);
double poisson_complex(const KernelParams& p, const BallPoint& z, const SpherePoint& zeta);
double poisson(const KernelParams& p, const BallPoint& x, const SpherePoint& zeta);

double kernel_radial_derivative_real(const KernelParams& p, const BallPoint& x,
                                     const SpherePoint& zeta);
double kernel_radial_derivative_complex(const KernelParams& p, const BallPoint& z,
                                        const SpherePoint& zeta);

/// <z, w> = sum z_j conj(w_j) for interleaved 2n-real vectors.
std::complex<double> hermitian(std::span<const double> z, std::span<const double> w);

/// Outcome of a two-sided bound check. Slacks are (observed - lower) and
/// (upper - observed) in units of P / (1 - r^2); negative means violated.
struct BoundCheck {
  bool verdict = false;
  double lower = 0.0;
  double upper = 0.0;
  double observed = 0.0;
  double slack_lower = 0.0;
  double slack_upper = 0.0;
};

/// Radial-derivative bounds for P_lambda along x = r eta.
BoundCheck real_derivative_bounds(const KernelParams& p, const BallPoint& x, const SpherePoint& zeta);

/// Variants of the complex radial-derivative bound.
enum class ComplexBoundForm {
  consistent,         // (2n+2a -+ 2a r)(1-r^2)^{n+2a-1} / |1 - z.conj(zeta)|^{2n+2a}
  reduced_exponent,   // same coefficient over |1 - z.conj(zeta)|^{n+2a}
  halved_coefficient  // (n+2a -+ 2a r) in place of (2n+2a -+ 2a r)
};

BoundCheck complex_derivative_bounds(const KernelParams& p, const BallPoint& z, const SpherePoint& zeta,
                          ComplexBoundForm form = ComplexBoundForm::consistent);

struct ScalarInequality {
  bool first = false;
  bool second = false;
  double slack_first = 0.0;   // 1 + r|a|^2 - (1+r) Re a
  double slack_second = 0.0;  // 1 - r|a|^2 - (r-1) Re a
};

/// 1 + r|a|^2 >= (1+r) Re a and 1 - r|a|^2 >= (r-1) Re a for |a| <= 1.
ScalarInequality scalar_inequality(std::complex<double> a, double r);

/// Relative tolerance for bound verdicts, covering roundoff in the
/// closed-form evaluation.
inline constexpr double kBoundTolerance = 1e-10;

}  // namespace ihb
