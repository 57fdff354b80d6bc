#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ihb/error.hpp"
#include "ihb/parallel.hpp"

namespace ihb {

/// Unit vector in R^d. Construction normalizes; the zero vector is rejected.
class SpherePoint {
 public:
  SpherePoint() = default;
  explicit SpherePoint(std::vector<double> coords);

  /// Coordinate axis e_i (0-based) in R^dim.
  static SpherePoint basis(std::size_t dim, std::size_t i);

  std::size_t dim() const { return coords_.size(); }
  const std::vector<double>& coords() const { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }

  double dot(const SpherePoint& other) const;
  SpherePoint negated() const;

 private:
  std::vector<double> coords_;
};

double dot(std::span<const double> a, std::span<const double> b);

/// |a - b|^2 summed coordinate-wise, which stays accurate when a and b are
/// nearly equal (unlike 2 - 2 a.b).
double chord2(std::span<const double> a, std::span<const double> b);

double distance(const SpherePoint& a, const SpherePoint& b);

/// x = r * direction with 0 <= r < 1.
class BallPoint {
 public:
  BallPoint(double r, SpherePoint direction);

  /// Rejects points with |x| >= 1. The origin gets direction e_1.
  static BallPoint from_cartesian(std::span<const double> x);

  double r() const { return r_; }
  /// 1 - r; exact in floating point for r >= 1/2.
  double gap() const { return 1.0 - r_; }
  const SpherePoint& direction() const { return direction_; }
  std::size_t dim() const { return direction_.dim(); }
  std::vector<double> cartesian() const;

 private:
  double r_;
  SpherePoint direction_;
};

/// Surface measure of S^{d-1} in R^d.
double sphere_area(std::size_t d);

std::vector<SpherePoint> sample_uniform(std::size_t dim, std::size_t count,
                                        std::uint64_t seed);

/// Fills `out` (dim * count values) with uniform unit vectors.
void sample_uniform_flat(std::size_t dim, std::size_t count, std::uint64_t seed,
                         std::vector<double>& out);

enum class RuleKind { deterministic_product, monte_carlo };

struct QuadratureRule {
  std::size_t dim = 0;
  std::vector<double> nodes;  // dim * size(), row-major
  std::vector<double> weights;
  RuleKind kind = RuleKind::deterministic_product;
  std::optional<std::uint64_t> seed;
  std::size_t level = 0;

  std::size_t size() const { return weights.size(); }
  std::span<const double> node(std::size_t i) const {
    return {nodes.data() + i * dim, dim};
  }
  SpherePoint point(std::size_t i) const;
};

QuadratureRule build_quadrature(std::size_t dim, std::size_t level,
                                RuleKind kind,
                                std::optional<std::uint64_t> seed = {});

/// Gauss-Legendre nodes and weights on [-1, 1]; cached per order.
struct GaussLegendre {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussLegendre& gauss_legendre(std::size_t order);

struct Integral {
  double value = 0.0;
  /// Sample standard error for Monte Carlo rules, 0 for deterministic rules.
  double std_error = 0.0;
};

namespace detail {
[[noreturn]] void throw_overflow(std::span<const double> node);

struct SumMoments {
  double sum = 0.0;
  parallel::Moments m;
  SumMoments& operator+=(const SumMoments& o) {
    sum += o.sum;
    m += o.m;
    return *this;
  }
};

Integral finish(const QuadratureRule& rule, const SumMoments& acc);
}  // namespace detail

/// Weighted node sum of f(node) where f takes std::span<const double>.
template <class F>
Integral integrate(const QuadratureRule& rule, F&& f, bool parallel = true) {
  auto term = [&](std::size_t i, detail::SumMoments& acc) {
    const auto x = rule.node(i);
    const double v = f(x);
    if (!std::isfinite(v)) detail::throw_overflow(x);
    acc.sum += rule.weights[i] * v;
    acc.m.add(v);
  };
  return detail::finish(
      rule, parallel::blocked_reduce<detail::SumMoments>(rule.size(), term,
                                                         parallel));
}

template <class F>
Integral integrate_serial(const QuadratureRule& rule, F&& f) {
  return integrate(rule, std::forward<F>(f), false);
}

}  // namespace ihb
