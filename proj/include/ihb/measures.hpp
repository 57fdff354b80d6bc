#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ihb/geometry.hpp"

namespace ihb {

struct AtomSpec {
  SpherePoint point;
  double weight = 0.0;
};

enum class DensityFamily { constant, zonal_poly, exp_zonal };

const char* to_string(DensityFamily f);

/// Density g(xi) = G(xi . axis) on the sphere:
///   constant    G = c
///   zonal-poly  G(t) = sum_k c_k t^k, degree <= 6
///   exp-zonal   G(t) = c exp(kappa t), params [c, kappa]
class DensitySpec {
 public:
  DensitySpec(DensityFamily family, std::vector<double> params, SpherePoint axis);

  DensityFamily family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  const SpherePoint& axis() const { return axis_; }
  std::size_t dim() const { return axis_.dim(); }

  /// G(t) for t = xi . axis.
  double profile(double t) const;
  double operator()(std::span<const double> xi) const;

  /// Exact integral of g over S^{d-1} (one-dimensional Gauss-Legendre in the
  /// polar angle about the axis).
  double mass() const;

  /// Order of vanishing of g at p, measured in powers of |xi - p|: 0 where
  /// g(p) > 0. Empty when g vanishes identically.
  std::optional<int> vanishing_order(const SpherePoint& p) const;

  bool identically_zero() const;
  DensitySpec scaled(double factor) const;

 private:
  DensityFamily family_;
  std::vector<double> params_;
  SpherePoint axis_;
};

class MeasureSpec {
 public:
  MeasureSpec(std::size_t dim, std::vector<AtomSpec> atoms,
              std::optional<DensitySpec> density, bool normalize = false);

  std::size_t dim() const { return dim_; }
  const std::vector<AtomSpec>& atoms() const { return atoms_; }
  const std::optional<DensitySpec>& density() const { return density_; }
  bool normalized() const { return normalize_; }
  bool has_density() const { return density_ && !density_->identically_zero(); }

  double atom_mass() const;
  /// Atoms plus the exact density mass.
  double exact_mass() const;

 private:
  std::size_t dim_;
  std::vector<AtomSpec> atoms_;
  std::optional<DensitySpec> density_;
  bool normalize_;
};

MeasureSpec parse_measure(std::string_view text);
std::string measure_to_json(const MeasureSpec& m);

/// Atom weights plus the density integrated with `rule`.
double total_mass(const MeasureSpec& m, const QuadratureRule& rule);
double atom_mass_at(const MeasureSpec& m, const SpherePoint& p);
bool complement_mass_positive(const MeasureSpec& m, const SpherePoint& p,
                              const QuadratureRule& rule);

inline constexpr double kAtomMatchDistance = 1e-9;

}  // namespace ihb
