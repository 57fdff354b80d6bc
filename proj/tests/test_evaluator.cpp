#include <doctest.h>

#include <random>

#include "ihb/evaluator.hpp"
#include "ihb/oracle.hpp"
#include "ihb/suites.hpp"
#include "support.hpp"

using namespace ihb;

TEST_SUITE("evaluator") {
  const QuadratureRule q2 = build_quadrature(2, 32, RuleKind::deterministic_product);
  const QuadratureRule q3 = build_quadrature(3, 32, RuleKind::deterministic_product);

  TEST_CASE("value at the origin is the total mass") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 20; ++t) {
      const KernelParams p(Field::real, 2 + t % 2, t % 4 == 0 ? -3.0 : 0.5);
      const MeasureSpec m = random_measure(rng, p.sphere_dim());
      const QuadratureRule& q = p.n == 2 ? q2 : q3;
      const Evaluation e = evaluate_u(p, m, BallPoint(0.0, SpherePoint::basis(p.n, 0)), q);
      CHECK(test::rel_diff(e.value, m.exact_mass()) < 1e-8);
    }
  }

  TEST_CASE("point mass on its own ray") {
    const SpherePoint z = SpherePoint::basis(2, 1);
    const Evaluation e =
        evaluate_u(KernelParams(Field::real, 2, 0.0), test::point_mass({0, 1}), BallPoint(0.5, z), q2);
    CHECK(e.value == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(e.error == 0.0);
  }

  TEST_CASE("uniform density gives the mean value") {
    const KernelParams p(Field::real, 3, 0.0);
    const MeasureSpec m = test::uniform_density(3);
    for (double r : {0.0, 0.3, 0.6, 0.9}) {
      const Evaluation e = evaluate_u(p, m, BallPoint(r, SpherePoint({0.1, 0.7, -0.2})), q3);
      CHECK(std::abs(e.value - 1.0) < 1e-6);
    }
  }

  TEST_CASE("degenerate parameter gives the constant kernel") {
    const KernelParams p(Field::real, 2, -1.0);
    const Evaluation e =
        evaluate_u(p, test::point_mass({1, 0}, 2.0), BallPoint(0.5, SpherePoint::basis(2, 1)), q2);
    CHECK(e.value == doctest::Approx(8.0 / 3.0));
  }

  TEST_CASE("potential of a point mass") {
    const KernelParams p(Field::real, 2, 0.0);
    const SpherePoint z = SpherePoint::basis(2, 1);
    CHECK(evaluate_potential_U(p, test::point_mass({0, 1}), BallPoint(0.5, z), q2).value ==
          doctest::Approx(4.0));
    CHECK(evaluate_potential_U(p, test::point_mass({0, 1}, 3.0), BallPoint(0.0, z), q2).value ==
          doctest::Approx(3.0));
    CHECK_THROWS_AS(evaluate_potential_U(KernelParams(Field::complex, 1, 0.0),
                                         test::point_mass({0, 1}), BallPoint(0.5, z), q2),
                    Error);
  }

  TEST_CASE("potential identity on random inputs") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < 30; ++t) {
      const KernelParams p(Field::real, 2 + t % 2, -3.0 + 5.0 * unit(rng));
      if (p.degenerate()) continue;
      const MeasureSpec m = random_measure(rng, p.sphere_dim());
      const SpherePoint zeta = sample_uniform(p.sphere_dim(), 1, rng())[0];
      const double r = 0.95 * unit(rng);
      const QuadratureRule& q = p.n == 2 ? q2 : q3;
      const BallPoint x(r, zeta);
      const double U = evaluate_potential_U(p, m, x, q).value;
      const double u = evaluate_u(p, m, x, q).value;
      const double left = std::pow(1.0 - r, p.distance_exponent()) * U;
      const double right = std::pow(1.0 - r, p.n - 1) / std::pow(1.0 + r, 1.0 + 2.0 * p.lambda) * u;
      CHECK(test::rel_diff(left, right) < 1e-8);
    }
  }

  TEST_CASE("linear in the measure") {
    const KernelParams p(Field::real, 3, 0.5);
    const SpherePoint a({0.2, 0.3, 0.9});
    const DensitySpec g(DensityFamily::zonal_poly, {1.0, 0.4, 0.2}, SpherePoint({1, 0, 0}));
    const MeasureSpec m1(3, {AtomSpec{a, 0.7}}, std::nullopt);
    const MeasureSpec m2(3, {}, g);
    const MeasureSpec both(3, {AtomSpec{a, 0.7}}, g);
    const BallPoint x(0.8, SpherePoint({0.3, 0.3, 0.5}));
    const double sum = evaluate_u(p, m1, x, q3).value + evaluate_u(p, m2, x, q3).value;
    CHECK(test::rel_diff(evaluate_u(p, both, x, q3).value, sum) < 1e-12);
  }

  TEST_CASE("profiles") {
    const KernelParams p(Field::real, 3, 0.5);
    const SpherePoint z = SpherePoint::basis(3, 2);
    CHECK(radial_profile(p, test::point_mass({0, 0, 1}), z, {}, q3).u_values.empty());

    const std::vector<double> grid = linear_grid(20, 0.99);
    const RadialProfile atom = radial_profile(p, test::point_mass({0, 0, 1}), z, grid, q3);
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(atom.u_values[i] > atom.u_values[i - 1]);

    const RadialProfile flat =
        radial_profile(KernelParams(Field::real, 3, 0.0), test::uniform_density(3, 2.0), z, grid, q3);
    for (double v : flat.u_values) CHECK(std::abs(v - 2.0) < 1e-6);

    CHECK_THROWS_AS(radial_profile(p, test::point_mass({0, 0, 1}), z, {0.5, 0.4}, q3), Error);
    CHECK_THROWS_AS(radial_profile(p, test::point_mass({0, 0, 1}), z, {0.5, 1.0 - 1e-7}, q3),
                    Error);
  }

  TEST_CASE("parallel profile is bit-identical to the serial one") {
    std::mt19937_64 rng(31);
    const KernelParams p(Field::complex, 2, -0.7);
    const MeasureSpec m = random_measure(rng, 4, {0, 2, 1.0});
    const SpherePoint z = sample_uniform(4, 1, 2)[0];
    const QuadratureRule q4 = build_quadrature(4, 12, RuleKind::deterministic_product);
    const std::vector<double> grid = linear_grid(16, 0.99);
    const RadialProfile a = radial_profile(p, m, z, grid, q4);
    const RadialProfile b = radial_profile_serial(p, m, z, grid, q4);
    CHECK(a.u_values == b.u_values);
    CHECK(a.quadrature_error == b.quadrature_error);
  }

  TEST_CASE("agrees with the independent oracle") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 10; ++t) {
      const KernelParams p(Field::real, 3, t % 2 ? -2.0 : 0.5);
      const MeasureSpec m = random_measure(rng, 3, {0, 0, 1.0});
      const BallPoint x(0.6, sample_uniform(3, 1, rng())[0]);
      const Evaluation e = evaluate_u(p, m, x, q3);
      const OracleValue o = oracle_evaluate_u(p, m, x.cartesian(), 200000, rng());
      CHECK(std::abs(e.value - o.value) <= 4.0 * o.std_error + 10.0 * e.error);
    }
  }

  TEST_CASE("dimension mismatch") {
    CHECK_THROWS_AS(evaluate_u(KernelParams(Field::real, 3, 0.0), test::point_mass({0, 1}),
                               BallPoint(0.5, SpherePoint::basis(3, 0)), q3),
                    Error);
  }
}
