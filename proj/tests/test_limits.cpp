#include <doctest.h>

#include "ihb/limits.hpp"
#include "ihb/oracle.hpp"
#include "support.hpp"

using namespace ihb;

TEST_SUITE("limits") {
  const QuadratureRule q2 = build_quadrature(2, 32, RuleKind::deterministic_product);
  const QuadratureRule q3 = build_quadrature(3, 32, RuleKind::deterministic_product);
  const QuadratureRule q4 = build_quadrature(4, 16, RuleKind::deterministic_product);
  const SpherePoint z2 = SpherePoint::basis(2, 1);

  void check_finite(const LimitReport& r, double target, double tol) {
    CHECK(r.classification == LimitClass::finite);
    CHECK(r.target_classification == LimitClass::finite);
    REQUIRE(r.estimate);
    REQUIRE(r.target);
    CHECK(*r.target == doctest::Approx(target).epsilon(1e-14));
    CHECK(std::abs(*r.estimate - target) <= tol * std::max(1.0, std::abs(target)));
  }

  void check_divergent(const LimitReport& r) {
    CHECK(r.classification == LimitClass::divergent);
    CHECK(r.target_classification == LimitClass::divergent);
    CHECK_FALSE(r.estimate);
    CHECK_FALSE(r.target);
  }

  TEST_CASE("mass limit cases") {
    const KernelParams p0(Field::real, 2, 0.0);
    check_finite(limit_mass(p0, test::point_mass({0, 1}), z2, q2), 2.0, 1e-8);
    check_finite(limit_mass(p0, test::point_mass({0, -1}), z2, q2), 0.0, 1e-8);
    const KernelParams low(Field::real, 2, -2.0);
    check_divergent(limit_mass(low, test::point_mass({0, -1}), z2, q2));
    check_finite(limit_mass(low, test::point_mass({0, 1}, 0.8), z2, q2), 0.1, 1e-8);
  }

  TEST_CASE("potential limit cases") {
    const KernelParams p0(Field::real, 2, 0.0);
    check_finite(limit_potential(p0, test::point_mass({0, -1}), z2, q2), 0.5, 1e-8);
    check_divergent(limit_potential(p0, test::point_mass({0, 1}), z2, q2));
  }

  TEST_CASE("complex limits") {
    const KernelParams c(Field::complex, 1, 0.0);
    check_finite(limit_mass(c, test::point_mass({0, 1}), z2, q2), 2.0, 1e-8);
    check_finite(limit_potential(c, test::point_mass({0, -1}), z2, q2), 0.5, 1e-8);
    check_divergent(limit_mass(KernelParams(Field::complex, 2, -3.0),
                               test::point_mass({1, 0, 0, 0}), SpherePoint::basis(4, 2), q4));
  }

  TEST_CASE("uniform density potentials") {
    const SpherePoint z = SpherePoint::basis(3, 2);
    const MeasureSpec m = test::uniform_density(3);
    check_divergent(limit_potential(KernelParams(Field::real, 3, 0.5), m, z, q3));
    for (double l : {-0.8, -2.0}) {
      const KernelParams p(Field::real, 3, l);
      const LimitReport r = limit_potential(p, m, z, q3);
      REQUIRE(r.target);
      REQUIRE(r.estimate);
      // |zeta - xi| on S^2 has density rho/2 on [0, 2], so
      // E|zeta - xi|^{-q} = 2^{1-q} / (2 - q).
      const double q = p.distance_exponent();
      const double expected = std::pow(2.0, 1.0 + 2.0 * l) * std::pow(2.0, 1.0 - q) / (2.0 - q);
      CHECK(test::rel_diff(*r.target, expected) < 1e-8);
      CHECK(test::rel_diff(*r.estimate, expected) < 1e-6);
    }
    // Finite-variance case against the Monte Carlo oracle.
    const KernelParams p(Field::real, 3, -1.2);
    const LimitReport r = limit_potential(p, m, z, q3);
    REQUIRE(r.estimate);
    const OracleValue o = oracle_density_integral(
        m,
        [&](std::span<const double> xi) {
          return std::pow(2.0, -1.4) * std::pow(chord2(xi, z.coords()), -0.3);
        },
        400000, 9);
    CHECK(std::abs(*r.estimate - o.value) <= 4.0 * o.std_error);
  }

  TEST_CASE("richardson removes known power terms") {
    std::vector<double> g;
    for (int k = 3; k <= 12; ++k) {
      const double t = std::ldexp(1.0, -k);
      g.push_back(2.0 + 3.0 * t - t * t + 0.5 * std::pow(t, 1.5));
    }
    const auto [v, change] = richardson(g, {1.0, 1.5, 2.0});
    CHECK(std::abs(v - 2.0) < 1e-12);
    CHECK(std::abs(change) < 1e-6);
  }

  TEST_CASE("report json") {
    const LimitReport r =
        limit_mass(KernelParams(Field::real, 2, 0.0), test::point_mass({0, 1}), z2, q2);
    const json j = limit_report_json(r);
    CHECK(j["kind"] == "mass-limit");
    CHECK(j["classification"] == "finite");
    CHECK(j["r_sequence"].size() == j["values"].size());
    const json d = limit_report_json(
        limit_potential(KernelParams(Field::real, 2, 0.0), test::point_mass({0, 1}), z2, q2));
    CHECK(d["estimate"] == "divergent");
  }

  TEST_CASE("degenerate parameters are rejected") {
    CHECK_THROWS_AS(limit_mass(KernelParams(Field::real, 2, -1.0), test::point_mass({0, 1}), z2, q2),
                    Error);
  }
}
