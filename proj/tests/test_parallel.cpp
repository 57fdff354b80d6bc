#include <doctest.h>

#include <random>

#include "ihb/evaluator.hpp"
#include "ihb/parallel.hpp"
#include "ihb/suites.hpp"
#include "support.hpp"

using namespace ihb;

TEST_SUITE("parallel") {
  TEST_CASE("blocked reduction is independent of the thread count") {
    auto term = [](std::size_t i, double& acc) { acc += 1.0 / (1.0 + static_cast<double>(i)); };
    const double serial = parallel::blocked_reduce<double>(100000, term, false);
    const int saved = parallel::thread_count();
    for (int t : {1, 2, 3, 8}) {
      parallel::set_thread_count(t);
      CHECK(parallel::blocked_reduce<double>(100000, term) == serial);
    }
    parallel::set_thread_count(saved);
  }

  TEST_CASE("the lowest failing index wins") {
    std::vector<int> hits(1000, 0);
    try {
      parallel::for_each_index(1000, [&](std::size_t i) {
        hits[i] = 1;
        if (i % 97 == 13) throw Error(ErrorKind::internal, std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const Error& e) {
      CHECK(std::string(e.what()) == "13");
    }
  }

  TEST_CASE("derived seeds differ per stream and index") {
    CHECK(parallel::derive_seed(1, 2, 3) == parallel::derive_seed(1, 2, 3));
    CHECK(parallel::derive_seed(1, 2, 3) != parallel::derive_seed(1, 2, 4));
    CHECK(parallel::derive_seed(1, 2, 3) != parallel::derive_seed(1, 3, 3));
  }

  TEST_CASE("suite reports do not depend on the thread count") {
    SuiteOptions opt;
    opt.trials = 20;
    opt.seed = 5;
    const int saved = parallel::thread_count();
    parallel::set_thread_count(1);
    const std::string one = run_suite("harnack", opt).report.dump();
    parallel::set_thread_count(4);
    const std::string four = run_suite("harnack", opt).report.dump();
    parallel::set_thread_count(saved);
    CHECK(one == four);
  }

  TEST_CASE("monte carlo density integral matches its serial path") {
    const QuadratureRule q = build_quadrature(3, 30000, RuleKind::monte_carlo, 4);
    auto f = [](std::span<const double> x) { return std::exp(x[0] - x[2]); };
    const Integral a = integrate(q, f);
    const Integral b = integrate_serial(q, f);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
  }
}
