#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ihb/evaluator.hpp"
#include "ihb/io.hpp"

namespace ihb {

using FieldFn = std::function<double(std::span<const double>)>;

/// (1-|x|^2) { (1-|x|^2)/4 sum d^2/dx_j^2 + lambda sum x_j d/dx_j + lambda(n/2-1-lambda) }
/// by central differences in Cartesian coordinates.
double apply_delta_lambda(const KernelParams& p, const FieldFn& f, std::span<const double> x,
                          double h);

/// 4(1-|z|^2) { sum (delta_ij - z_i conj z_j) d^2/dz_i dconj(z_j)
///              + alpha sum z_j d/dz_j + alpha sum conj z_j d/dconj(z_j) - alpha^2 }
/// through real partials of the interleaved coordinates.
double apply_delta_alpha(const KernelParams& p, const FieldFn& f, std::span<const double> z,
                         double h);

/// Dispatches on the field.
double apply_operator(const KernelParams& p, const FieldFn& f, std::span<const double> x,
                      double h);

struct ResidualReport {
  KernelParams params;
  double h = 0.0;
  std::size_t samples = 0;
  double max_residual = 0.0;     // |L u| / |u|
  double median_residual = 0.0;
  /// Median of log2(res(h) / res(h/2)) over the samples.
  double convergence_order_estimate = 0.0;
  double order_min = 0.0;
  double order_max = 0.0;
  /// Largest |L u| / |u| that quadrature error alone could produce.
  double noise_floor = 0.0;
  bool noise_dominated = false;
  std::vector<double> residuals;
};

ResidualReport residual_report(const KernelParams& p, const MeasureSpec& m,
                               const QuadratureRule& rule, std::size_t sample_count,
                               std::uint64_t seed, double h);

json residual_report_json(const ResidualReport& r);

inline constexpr double kResidualMaxRadius = 0.7;
/// Step for convergence-order estimates (h against h/2): truncation error
/// dominates roundoff there for every kernel in the verification grids.
inline constexpr double kResidualOrderStep = 4e-3;

}  // namespace ihb
