#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ihb/geometry.hpp"

using namespace ihb;

TEST_SUITE("geometry") {
  TEST_CASE("sampled points are unit vectors") {
    const auto pts = sample_uniform(2, 4, 7);
    REQUIRE(pts.size() == 4);
    for (const SpherePoint& p : pts) {
      CHECK(std::abs(std::hypot(p[0], p[1]) - 1.0) < 1e-12);
    }
  }

  TEST_CASE("uniform samples have a small mean") {
    const auto pts = sample_uniform(3, 10000, 1);
    double m[3] = {0, 0, 0};
    for (const SpherePoint& p : pts) {
      for (int i = 0; i < 3; ++i) m[i] += p[i] / 10000.0;
    }
    CHECK(std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) < 0.05);
  }

  TEST_CASE("dimension one is rejected") {
    CHECK_THROWS_AS(sample_uniform(1, 3, 0), Error);
    CHECK_THROWS_AS(build_quadrature(1, 8, RuleKind::deterministic_product), Error);
  }

  TEST_CASE("sampling is reproducible per seed") {
    const auto a = sample_uniform(4, 50, 99);
    const auto b = sample_uniform(4, 50, 99);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].coords() == b[i].coords());
  }

  TEST_CASE("circle rule has level nodes and total weight 2 pi") {
    const QuadratureRule q = build_quadrature(2, 8, RuleKind::deterministic_product);
    CHECK(q.size() == 8);
    double s = 0.0;
    for (double w : q.weights) s += w;
    CHECK(std::abs(s - 2.0 * std::numbers::pi) < 1e-12);
  }

  TEST_CASE("sphere rule integrates constants and moments") {
    const QuadratureRule q = build_quadrature(3, 16, RuleKind::deterministic_product);
    double s = 0.0;
    for (double w : q.weights) s += w;
    CHECK(std::abs(s - 4.0 * std::numbers::pi) < 1e-10);
    CHECK(std::abs(integrate(q, [](auto) { return 1.0; }).value - 4.0 * std::numbers::pi) <
          1e-10);
    CHECK(std::abs(integrate(q, [](auto) { return 2.5; }).value -
                   2.5 * 4.0 * std::numbers::pi) < 1e-10);
    CHECK(std::abs(integrate(q, [](auto x) { return x[0]; }).value) < 1e-10);
    const double e[3] = {0.48, -0.6, 0.64};
    const double second = integrate(q, [&](auto x) {
                            const double t = e[0] * x[0] + e[1] * x[1] + e[2] * x[2];
                            return t * t;
                          }).value;
    // E[(x.e)^2] = 1/3 under the uniform law, times |S^2| = 4 pi.
    CHECK(std::abs(second - 4.0 * std::numbers::pi / 3.0) < 1e-8);
  }

  TEST_CASE("zonal integrals do not depend on the axis") {
    const QuadratureRule q = build_quadrature(3, 16, RuleKind::deterministic_product);
    auto zonal = [&](const SpherePoint& e) {
      return integrate(q, [&](auto x) {
               const double t = e[0] * x[0] + e[1] * x[1] + e[2] * x[2];
               return 1.0 + t - 2.0 * t * t + 0.5 * t * t * t * t;
             }).value;
    };
    const double ref = zonal(SpherePoint::basis(3, 2));
    for (const SpherePoint& e : sample_uniform(3, 5, 3)) {
      CHECK(std::abs(zonal(e) - ref) < 1e-8);
    }
  }

  TEST_CASE("monte carlo reports a standard error") {
    const QuadratureRule q = build_quadrature(3, 40000, RuleKind::monte_carlo, 5);
    const Integral v = integrate(q, [](auto x) { return x[2] * x[2]; });
    CHECK(v.std_error > 0.0);
    CHECK(std::abs(v.value - 4.0 * std::numbers::pi / 3.0) < 4.0 * v.std_error);
  }

  TEST_CASE("integrate is linear and parallel matches serial bit for bit") {
    const QuadratureRule q = build_quadrature(4, 12, RuleKind::deterministic_product);
    auto f = [](auto x) { return std::exp(x[0]) + x[1] * x[3]; };
    auto g = [](auto x) { return x[2] * x[2]; };
    const double lhs = integrate(q, [&](auto x) { return 2.0 * f(x) - 3.0 * g(x); }).value;
    const double rhs = 2.0 * integrate(q, f).value - 3.0 * integrate(q, g).value;
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(rhs));
    CHECK(integrate(q, f).value == integrate_serial(q, f).value);
  }

  TEST_CASE("ball points stay inside the ball") {
    CHECK_THROWS_AS(BallPoint(1.0, SpherePoint::basis(2, 0)), Error);
    const double x[3] = {0.3, 0.0, -0.4};
    const BallPoint b = BallPoint::from_cartesian(x);
    CHECK(b.r() == doctest::Approx(0.5));
    CHECK(b.cartesian()[2] == doctest::Approx(-0.4));
    CHECK_THROWS_AS(SpherePoint({0.0, 0.0}), Error);
  }

  TEST_CASE("sphere areas") {
    CHECK(sphere_area(2) == doctest::Approx(2.0 * std::numbers::pi));
    CHECK(sphere_area(3) == doctest::Approx(4.0 * std::numbers::pi));
    CHECK(sphere_area(4) == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi));
  }
}
