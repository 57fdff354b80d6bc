#include <doctest.h>

#include <random>

#include "ihb/kernels.hpp"
#include "support.hpp"

using namespace ihb;

namespace {

double fd_radial(const KernelParams& p, double r, const SpherePoint& eta, const SpherePoint& zeta,
                 double h) {
  return (poisson(p, BallPoint(r + h, eta), zeta) - poisson(p, BallPoint(r - h, eta), zeta)) /
         (2.0 * h);
}

double kernel_derivative(const KernelParams& p, const BallPoint& x, const SpherePoint& zeta) {
  return p.field == Field::real ? kernel_radial_derivative_real(p, x, zeta)
                                : kernel_radial_derivative_complex(p, x, zeta);
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("kernel is one at the origin") {
    for (double l : {-3.0, -0.5, 0.0, 2.0}) {
      const KernelParams p(Field::real, 3, l);
      CHECK(poisson_real(p, BallPoint(0.0, SpherePoint::basis(3, 0)), SpherePoint({1, 2, 3})) ==
            1.0);
    }
    const KernelParams c(Field::complex, 2, 0.7);
    CHECK(poisson_complex(c, BallPoint(0.0, SpherePoint::basis(4, 0)),
                          SpherePoint({1, 0, 1, 0})) == 1.0);
  }

  TEST_CASE("real kernel closed forms") {
    const SpherePoint z2 = SpherePoint::basis(2, 1);
    CHECK(poisson_real(KernelParams(Field::real, 2, 0.0), BallPoint(0.5, z2), z2) ==
          doctest::Approx(3.0).epsilon(1e-15));
    const SpherePoint z3 = SpherePoint::basis(3, 2);
    CHECK(poisson_real(KernelParams(Field::real, 3, 1.0), BallPoint(0.5, z3.negated()), z3) ==
          doctest::Approx(std::pow(0.75, 3) / std::pow(1.5, 5)).epsilon(1e-14));
  }

  TEST_CASE("degenerate real kernel ignores zeta") {
    const KernelParams p(Field::real, 3, -1.5);
    CHECK(p.degenerate());
    const BallPoint x(0.5, SpherePoint({0.3, 0.4, 0.5}));
    const double expected = std::pow(0.75, -2.0);
    CHECK(poisson_real(p, x, SpherePoint::basis(3, 0)) == doctest::Approx(expected));
    CHECK(poisson_real(p, x, SpherePoint::basis(3, 2)) == doctest::Approx(expected));
  }

  TEST_CASE("complex kernel closed forms") {
    const SpherePoint z2 = SpherePoint::basis(2, 0);
    CHECK(poisson_complex(KernelParams(Field::complex, 1, 0.0), BallPoint(0.5, z2), z2) ==
          doctest::Approx(3.0).epsilon(1e-15));
    // n + 2a = 1 and 2n + 2a = 3: 0.75 / 0.5^3.
    const SpherePoint z4 = SpherePoint::basis(4, 0);
    CHECK(poisson_complex(KernelParams(Field::complex, 2, -0.5), BallPoint(0.5, z4), z4) ==
          doctest::Approx(0.75 / 0.125).epsilon(1e-14));
  }

  TEST_CASE("complex kernel for n = 1 equals the real kernel for n = 2") {
    const KernelParams c(Field::complex, 1, 0.0);
    const KernelParams r(Field::real, 2, 0.0);
    for (const SpherePoint& zeta : sample_uniform(2, 5, 11)) {
      const BallPoint x(0.63, SpherePoint({0.6, -0.8}));
      CHECK(test::rel_diff(poisson(c, x, zeta), poisson(r, x, zeta)) < 1e-13);
    }
  }

  TEST_CASE("hermitian product") {
    const std::vector<double> z{1, 2, 3, -1};
    const std::vector<double> w{0, 1, 2, 2};
    // (1+2i)(0-i) + (3-i)(2-2i) = (2 - i) + (4 - 8i)
    const std::complex<double> h = hermitian(z, w);
    CHECK(h.real() == doctest::Approx(6.0));
    CHECK(h.imag() == doctest::Approx(-9.0));
  }

  TEST_CASE("kernel at the boundary is a domain error") {
    CHECK_THROWS_AS(BallPoint(1.0, SpherePoint::basis(2, 0)), Error);
    const double x[2] = {1.0, 0.0};
    CHECK_THROWS_AS(BallPoint::from_cartesian(x), Error);
  }

  TEST_CASE("on-axis radial derivative") {
    const SpherePoint z = SpherePoint::basis(2, 1);
    CHECK(kernel_radial_derivative_real(KernelParams(Field::real, 2, 0.0), BallPoint(0.5, z), z) ==
          doctest::Approx(8.0).epsilon(1e-14));
  }

  TEST_CASE("radial derivatives match central differences") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
      const bool real = t % 2 == 0;
      const int n = real ? 2 + t % 3 : 1 + (t / 2) % 2;
      const KernelParams p(real ? Field::real : Field::complex, n, -3.0 + 6.0 * unit(rng));
      if (p.degenerate()) continue;
      const std::size_t d = p.sphere_dim();
      const SpherePoint eta = sample_uniform(d, 1, rng())[0];
      const SpherePoint zeta = sample_uniform(d, 1, rng())[0];
      const double r = t % 10 == 0 ? 0.0 : 0.9 * unit(rng);
      const double exact = kernel_derivative(p, BallPoint(r, eta), zeta);
      if (r == 0.0) {
        // One-sided at the origin: extend the ray through -eta.
        const double h = 1e-5;
        const double fd = (poisson(p, BallPoint(h, eta), zeta) -
                           poisson(p, BallPoint(h, eta.negated()), zeta)) /
                          (2.0 * h);
        CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
        continue;
      }
      const double h = std::min(1e-5, 0.5 * r);
      const double fd = fd_radial(p, r, eta, zeta, h);
      CHECK(std::abs(fd - exact) <= 1e-6 * std::max(std::abs(exact), poisson(p, BallPoint(r, eta), zeta)));
    }
  }

  TEST_CASE("finite difference error shrinks fourfold when h halves") {
    const KernelParams p(Field::real, 3, 0.5);
    const SpherePoint eta({0.2, 0.5, -0.3});
    const SpherePoint zeta({0.9, 0.1, 0.2});
    const double r = 0.4;
    const double exact = kernel_radial_derivative_real(p, BallPoint(r, eta), zeta);
    const double e1 = std::abs(fd_radial(p, r, eta, zeta, 1e-3) - exact);
    const double e2 = std::abs(fd_radial(p, r, eta, zeta, 5e-4) - exact);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  }

  TEST_CASE("real derivative bounds are tight on the ray") {
    for (double l : {-3.0, -1.2, 0.0, 0.7, 2.0}) {
      const KernelParams p(Field::real, 3, l);
      const SpherePoint z = SpherePoint::basis(3, 2);
      const BoundCheck fwd = real_derivative_bounds(p, BallPoint(0.6, z), z);
      const BoundCheck back = real_derivative_bounds(p, BallPoint(0.6, z.negated()), z);
      CHECK(fwd.verdict);
      CHECK(back.verdict);
      if (p.upper_regime()) {
        CHECK(std::abs(fwd.slack_upper) < 1e-10);
        CHECK(std::abs(back.slack_lower) < 1e-10);
      } else {
        CHECK(std::abs(fwd.slack_lower) < 1e-10);
        CHECK(std::abs(back.slack_upper) < 1e-10);
      }
    }
    CHECK_THROWS_AS(real_derivative_bounds(KernelParams(Field::real, 2, -1.0),
                                   BallPoint(0.5, SpherePoint::basis(2, 0)),
                                   SpherePoint::basis(2, 0)),
                    Error);
  }

  TEST_CASE("complex derivative bounds are tight on the ray") {
    for (double a : {-4.0, -2.5, 0.0, 1.0}) {
      const KernelParams p(Field::complex, 2, a);
      const SpherePoint z({0.6, 0.0, 0.0, 0.8});
      const BoundCheck fwd = complex_derivative_bounds(p, BallPoint(0.6, z), z);
      const BoundCheck back = complex_derivative_bounds(p, BallPoint(0.6, z.negated()), z);
      CHECK(fwd.verdict);
      CHECK(back.verdict);
      CHECK(std::min(std::abs(fwd.slack_upper), std::abs(fwd.slack_lower)) < 1e-10);
      CHECK(std::min(std::abs(back.slack_upper), std::abs(back.slack_lower)) < 1e-10);
    }
    CHECK_THROWS_AS(complex_derivative_bounds(KernelParams(Field::complex, 2, -2.0),
                                   BallPoint(0.5, SpherePoint::basis(4, 0)),
                                   SpherePoint::basis(4, 0)),
                    Error);
  }

  TEST_CASE("reduced-exponent complex bound fails on the forward ray") {
    const KernelParams p(Field::complex, 2, 1.0);
    const SpherePoint z = SpherePoint::basis(4, 0);
    CHECK_FALSE(complex_derivative_bounds(p, BallPoint(0.8, z), z, ComplexBoundForm::halved_coefficient)
                    .verdict);
  }

  TEST_CASE("scalar inequality") {
    const ScalarInequality eq = scalar_inequality({1.0, 0.0}, 1.0);
    CHECK(eq.first);
    CHECK(eq.slack_first == 0.0);
    const ScalarInequality im = scalar_inequality({0.0, 1.0}, 0.3);
    CHECK(im.slack_first == doctest::Approx(1.3));
    CHECK_THROWS_AS(scalar_inequality({1.0, 0.5}, 0.5), Error);
  }

  TEST_CASE("ray-bound constants") {
    const KernelParams up(Field::real, 3, 0.5);
    CHECK(up.a() == 4.0);
    CHECK(up.b() == 0.0);
    const KernelParams low(Field::real, 2, -2.0);
    CHECK(low.a() == 2.0);
    CHECK(low.b() == -4.0);
    const KernelParams cu(Field::complex, 2, 1.0);
    CHECK(cu.a() == 6.0);
    CHECK(cu.b() == 2.0);
    const KernelParams cl(Field::complex, 1, -3.0);
    CHECK(cl.a() == 4.0);
    CHECK(cl.b() == -6.0);
  }
}
