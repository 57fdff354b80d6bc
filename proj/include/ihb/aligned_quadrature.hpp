#pragma once

// Density integrals of kernels that peak at a pole eta on the sphere. Nodes are
// placed in coordinates aligned with eta and graded geometrically toward it,
// so a peak of width ~(1 - r) is resolved for every r. The zonal density is
// averaged over the remaining sphere directions in closed form.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "ihb/kernels.hpp"
#include "ihb/measures.hpp"

namespace ihb {

/// Breakpoints on [0, end]: [0, first], then doubling widths up to
/// `max_width`, then uniform panels no wider than `max_width`.
std::vector<double> graded_breaks(double end, double first, double max_width);
void graded_breaks(double end, double first, double max_width, std::vector<double>& out);

inline double int_pow(double x, int k) {
  double v = 1.0;
  for (int i = 0; i < k; ++i) v *= x;
  return v;
}

class AlignedGeometry {
 public:
  enum class Kind { zonal, disk };

  /// eta: pole in R^d. Supported: real d in {2,3,4}; complex n in {1,2}.
  AlignedGeometry(const KernelParams& p, std::span<const double> eta, const DensitySpec& g);

  static bool supported(const KernelParams& p);

  Kind kind() const { return kind_; }

  /// Integral of g over the sphere S^k through the slice (x0 + beta * w_1),
  /// i.e. the contribution of all boundary points with the same kernel value.
  double slice_average(double x0, double beta) const;
  /// slice_average(x0 + t, beta) + slice_average(x0 - t, beta).
  double slice_average_pair(double x0, double t, double beta) const;

  double pole_axis() const { return c_pole_; }
  double turn_axis() const { return c_turn_; }
  double perp_axis() const { return c_perp_; }
  int slice_sphere() const { return slice_k_; }

 private:
  Kind kind_;
  const DensitySpec* g_;
  int slice_k_ = 0;       // dimension of the averaged sphere S^k
  double c_pole_ = 0.0;   // axis . eta
  double c_turn_ = 0.0;   // axis . (i eta) in the disk geometry
  double c_perp_ = 0.0;   // norm of the axis component orthogonal to the above
  double sphere_measure_ = 0.0;
  std::vector<double> moment_;  // E[w_1^j] on S^k, j = 0..6
};

struct AlignedResult {
  double value = 0.0;
  double error = 0.0;
  bool low_confidence = false;
  std::size_t order = 0;  // Gauss-Legendre points per panel in the last pass
};

namespace detail {

inline constexpr double kMaxPanelWidth = 0.39269908169872414;  // pi / 8
inline constexpr double kMaxSigmaWidth = 0.125;

inline double add_term(double weight, double log_k, double density) {
  const double v = weight * std::exp(log_k) * density;
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::overflow, "density integrand exceeds the double range");
  }
  return v;
}

/// `log_k(omr, im)` returns the log of the kernel at the boundary point with
/// 1 - Re<eta, xi> = omr and |Im<eta, xi>| = im.
template <class LogK>
double aligned_pass(const AlignedGeometry& geo, double r, double gap, LogK& log_k,
                    std::size_t order) {
  const GaussLegendre& gl = gauss_legendre(order);
  const double first = std::max(0.25 * gap, 1e-15);
  const std::vector<double> breaks = graded_breaks(std::numbers::pi, first, kMaxPanelWidth);
  std::vector<double> sb;
  const int k = geo.slice_sphere();
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double lo = breaks[p];
    const double half = 0.5 * (breaks[p + 1] - lo);
    double panel = 0.0;
    for (std::size_t i = 0; i < order; ++i) {
      const double th = lo + half * (gl.x[i] + 1.0);
      const double s_half = std::sin(0.5 * th);
      const double omr = 2.0 * s_half * s_half;
      const double ct = std::cos(th);
      const double st = std::sin(th);
      const double w = half * gl.w[i];
      if (geo.kind() == AlignedGeometry::Kind::zonal) {
        const double jac = int_pow(st, k);
        const double dens = geo.slice_average(ct * geo.pole_axis(), st * geo.perp_axis());
        if (dens == 0.0 || jac == 0.0) continue;
        panel += add_term(w * jac, log_k(omr, st), dens);
        continue;
      }
      // Disk geometry: <xi, eta> = cos(th) + i sin(th) sigma, sigma in [-1, 1].
      const double jac = int_pow(st, k + 1);
      if (jac == 0.0) continue;
      const double sigma_scale =
          r > 0.0 ? (gap + r * omr) / (r * st) : std::numeric_limits<double>::infinity();
      graded_breaks(1.0, std::min(0.25 * sigma_scale, kMaxSigmaWidth), kMaxSigmaWidth, sb);
      double inner = 0.0;
      for (std::size_t q = 0; q + 1 < sb.size(); ++q) {
        const double slo = sb[q];
        const double shalf = 0.5 * (sb[q + 1] - slo);
        for (std::size_t j = 0; j < order; ++j) {
          const double sigma = slo + shalf * (gl.x[j] + 1.0);
          const double one_m_s2 = (1.0 - sigma) * (1.0 + sigma);
          double wj = shalf * gl.w[j];
          if (k != 1) wj *= std::pow(one_m_s2, 0.5 * k - 0.5);
          const double beta = st * std::sqrt(one_m_s2) * geo.perp_axis();
          const double base = ct * geo.pole_axis();
          const double turn = st * sigma * geo.turn_axis();
          const double dens = geo.slice_average_pair(base, turn, beta);
          if (dens == 0.0) continue;
          inner += add_term(wj, log_k(omr, st * sigma), dens);
        }
      }
      panel += w * jac * inner;
    }
    total += panel;
  }
  return total;
}

}  // namespace detail

/// Refines the per-panel order from `base_order` by doubling until two
/// successive passes agree within `rel_tol` (or the order reaches
/// base_order * max_factor, flagged low-confidence). The error estimate is the
/// difference of the last two passes.
template <class LogK>
AlignedResult aligned_integral(const AlignedGeometry& geo, double r, double gap, LogK&& log_k,
                               std::size_t base_order, double rel_tol,
                               std::size_t max_factor = 64) {
  std::size_t order = std::max<std::size_t>(base_order, 2);
  const std::size_t cap = order * max_factor;
  double prev = detail::aligned_pass(geo, r, gap, log_k, order);
  AlignedResult out;
  for (;;) {
    order *= 2;
    const double cur = detail::aligned_pass(geo, r, gap, log_k, order);
    const double diff = std::abs(cur - prev);
    out.value = cur;
    out.error = diff + 4e-16 * std::abs(cur);
    out.order = order;
    if (diff <= rel_tol * std::abs(cur) || cur == 0.0) break;
    if (order >= cap) {
      out.low_confidence = true;
      break;
    }
    prev = cur;
  }
  return out;
}

}  // namespace ihb
