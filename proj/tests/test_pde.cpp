#include <doctest.h>

#include "ihb/pde.hpp"
#include "support.hpp"

using namespace ihb;

namespace {

FieldFn kernel_fn(const KernelParams& p, const SpherePoint& zeta) {
  return [p, zeta](std::span<const double> x) { return poisson(p, BallPoint::from_cartesian(x), zeta); };
}

double order(const KernelParams& p, const FieldFn& f, std::span<const double> x, double h) {
  return std::log2(std::abs(apply_operator(p, f, x, h)) / std::abs(apply_operator(p, f, x, h / 2)));
}

}  // namespace

TEST_SUITE("pde") {
  const std::vector<double> x2{0.3, -0.2};
  const std::vector<double> x3{0.1, 0.4, -0.3};

  TEST_CASE("constants and linear functions") {
    const FieldFn one = [](std::span<const double>) { return 1.0; };
    CHECK(apply_delta_lambda(KernelParams(Field::real, 3, 0.0), one, x3, 1e-3) == 0.0);
    CHECK(apply_delta_alpha(KernelParams(Field::complex, 1, 0.0), one, x2, 1e-3) == 0.0);
    // lambda = n/2 - 1 also kills constants.
    CHECK(apply_delta_lambda(KernelParams(Field::real, 4, 1.0), one, std::vector<double>{0.1, 0.2, 0.3, 0.1}, 1e-3) ==
          0.0);
    const FieldFn lin = [](std::span<const double> x) { return x[0]; };
    CHECK(std::abs(apply_delta_lambda(KernelParams(Field::real, 3, 0.0), lin, x3, 1e-3)) < 1e-9);
  }

  TEST_CASE("kernels are annihilated to second order") {
    for (double l : {-2.0, 0.0, 0.5, 2.0}) {
      const KernelParams p(Field::real, 3, l);
      const FieldFn f = kernel_fn(p, SpherePoint({0.0, 0.6, 0.8}));
      const double o = order(p, f, x3, 1e-3);
      CHECK(o >= 1.7);
      CHECK(o <= 2.3);
    }
    for (double a : {-2.0, 0.0, 1.0}) {
      const KernelParams p(Field::complex, 1, a);
      const double o = order(p, kernel_fn(p, SpherePoint({0.6, 0.8})), x2, 1e-3);
      CHECK(o >= 1.7);
      CHECK(o <= 2.3);
    }
    const KernelParams c2(Field::complex, 2, -0.5);
    const std::vector<double> z{0.2, -0.1, 0.3, 0.25};
    const double o = order(c2, kernel_fn(c2, SpherePoint({0.5, 0.5, -0.5, 0.5})), z, 1e-3);
    CHECK(o >= 1.7);
    CHECK(o <= 2.3);
  }

  TEST_CASE("degenerate closed form") {
    const KernelParams p(Field::real, 3, -1.5);
    const FieldFn f = [](std::span<const double> x) {
      const double s = 1.0 - (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
      return 2.0 * std::pow(s, -2.0);
    };
    const double u = f(x3);
    CHECK(std::abs(apply_delta_lambda(p, f, x3, 1e-3)) / u < 1e-4);
    CHECK(std::abs(apply_delta_lambda(p, f, x3, 5e-4)) < std::abs(apply_delta_lambda(p, f, x3, 1e-3)));
  }

  TEST_CASE("operator is linear") {
    const KernelParams p(Field::real, 2, 0.5);
    const SpherePoint a({1, 0}), b({-0.6, 0.8});
    const FieldFn fa = kernel_fn(p, a), fb = kernel_fn(p, b);
    const FieldFn sum = [&](std::span<const double> x) { return 0.3 * fa(x) + 1.7 * fb(x); };
    const double lhs = apply_operator(p, sum, x2, 1e-3);
    const double rhs = 0.3 * apply_operator(p, fa, x2, 1e-3) + 1.7 * apply_operator(p, fb, x2, 1e-3);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(fa(x2)) + std::abs(fb(x2))));
  }

  TEST_CASE("stencil checks") {
    const KernelParams p(Field::real, 2, 0.0);
    const FieldFn f = kernel_fn(p, SpherePoint({1, 0}));
    CHECK_THROWS_AS(apply_operator(p, f, x2, 0.1), Error);
    CHECK_THROWS_AS(apply_operator(p, f, x2, 1e-7), Error);
    const std::vector<double> edge{0.998, 0.0};
    try {
      apply_operator(p, f, edge, 1e-3);
      FAIL("expected a stencil error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::stencil_domain);
    }
  }

  TEST_CASE("residual report on atomic measures") {
    const KernelParams p(Field::real, 2, 0.0);
    const MeasureSpec m(2, {{SpherePoint({1, 0}), 1.0}, {SpherePoint({0, -1}), 0.5}}, std::nullopt);
    const QuadratureRule q = build_quadrature(2, 16, RuleKind::deterministic_product);
    const ResidualReport r = residual_report(p, m, q, 20, 1, 1e-3);
    CHECK(r.samples == 20);
    CHECK(r.max_residual <= 1e-4);
    CHECK(r.convergence_order_estimate == doctest::Approx(2.0).epsilon(0.15));
    CHECK_FALSE(r.noise_dominated);
    const json j = residual_report_json(r);
    CHECK(j.contains("max_residual"));
    CHECK(j.contains("convergence_order_estimate"));
  }

  TEST_CASE("density residuals carry a noise floor") {
    const KernelParams p(Field::real, 3, 0.5);
    const QuadratureRule coarse = build_quadrature(3, 2000, RuleKind::monte_carlo, 3);
    const ResidualReport r = residual_report(p, test::uniform_density(3), coarse, 6, 2, 1e-3);
    CHECK(r.noise_floor > 0.0);
    CHECK(r.noise_dominated);
  }
}
