#pragma once

#include <vector>

#include "ihb/aligned_quadrature.hpp"
#include "ihb/kernels.hpp"
#include "ihb/measures.hpp"

namespace ihb {

struct Evaluation {
  double value = 0.0;
  /// Error estimate of the density part (atoms are closed form).
  double error = 0.0;
  bool low_confidence = false;
};

struct EvalOptions {
  double rel_tol = 1e-10;
  std::size_t max_factor = 64;
};

/// log of a kernel written as  constant - (power / 2) log D,  where D is the
/// squared distance-like quantity for a boundary point at (omr, im):
///   real geometry     D = (1 - r)^2 + 2 r omr          (|x - xi|^2)
///   complex geometry  D = ((1 - r) + r omr)^2 + r^2 im^2  (|1 - z.conj(xi)|^2)
/// r = 1 gives the boundary versions |zeta - xi|^2 and |1 - <zeta, xi>|^2.
struct LogKernel {
  Field geometry = Field::real;
  double r = 0.0;
  double constant = 0.0;
  double power = 0.0;
  /// exp(constant) when it is a normal double, else 0. Lets closed-form
  /// terms skip the exp/log round trip.
  double factor = 0.0;

  double distance2(double omr, double im) const {
    const double h = 1.0 - r;
    if (geometry == Field::real) return h * h + 2.0 * r * omr;
    const double re = h + r * omr;
    return re * re + r * r * im * im;
  }

  double operator()(double omr, double im) const {
    if (power == 0.0) return constant;
    return constant - 0.5 * power * std::log(distance2(omr, im));
  }

  /// exp of the above, computed as factor * D^{-power/2} when that stays
  /// in range.
  double value(double omr, double im) const {
    if (factor > 0.0) {
      const double v = power == 0.0 ? factor : factor * std::pow(distance2(omr, im), -0.5 * power);
      if (std::isnormal(v)) return v;
    }
    return std::exp((*this)(omr, im));
  }
};

/// P(x, .) times (1 - r)^{gap_power}, evaluated in log space.
LogKernel poisson_log_kernel(const KernelParams& p, double r, double gap_power = 0.0);
/// |x - xi|^{-(n + 2 lambda)} (real field).
LogKernel potential_log_kernel(const KernelParams& p, double r);

/// Integral of exp(log_k) against m, with the kernel pole aligned with `eta`.
Evaluation integrate_measure(const KernelParams& p, const MeasureSpec& m,
                             std::span<const double> eta, const LogKernel& log_k,
                             const QuadratureRule& rule, const EvalOptions& opt = {});

Evaluation evaluate_u(const KernelParams& p, const MeasureSpec& m, const BallPoint& x,
                      const QuadratureRule& rule, const EvalOptions& opt = {});

/// (1 - r)^{gap_power} u(x), finite even where u itself overflows.
Evaluation evaluate_u_scaled(const KernelParams& p, const MeasureSpec& m, const BallPoint& x,
                             double gap_power, const QuadratureRule& rule,
                             const EvalOptions& opt = {});

Evaluation evaluate_potential_U(const KernelParams& p, const MeasureSpec& m,
                                const BallPoint& x, const QuadratureRule& rule,
                                const EvalOptions& opt = {});

struct RadialProfile {
  KernelParams params;
  SpherePoint zeta;
  std::vector<double> r_grid;
  std::vector<double> u_values;
  std::vector<double> quadrature_error;
  std::vector<bool> low_confidence;
};

inline constexpr double kProfileMaxR = 1.0 - 1e-6;

RadialProfile radial_profile(const KernelParams& p, const MeasureSpec& m,
                             const SpherePoint& zeta, const std::vector<double>& r_grid,
                             const QuadratureRule& rule, const EvalOptions& opt = {});
/// Single-threaded reference for radial_profile; results are bit-identical.
RadialProfile radial_profile_serial(const KernelParams& p, const MeasureSpec& m,
                                    const SpherePoint& zeta, const std::vector<double>& r_grid,
                                    const QuadratureRule& rule, const EvalOptions& opt = {});

/// Gauss-Legendre order per panel derived from a rule level.
std::size_t base_order_for_level(std::size_t level);

}  // namespace ihb
