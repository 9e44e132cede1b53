#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "gpsel/data.hpp"
#include "gpsel/errors.hpp"
#include "gpsel/fit.hpp"
#include "gpsel/model.hpp"

using namespace gpsel;

TEST_CASE("maximize_bfgs on concave quadratics") {
  SUBCASE("1-D, analytic gradient") {
    ObjFn f = [](const std::vector<double>& x) {
      return -(x[0] - 3.0) * (x[0] - 3.0);
    };
    GradFn g = [](const std::vector<double>& x) {
      return std::vector<double>{-2.0 * (x[0] - 3.0)};
    };
    const FitResult r = maximize_bfgs(f, g, {0.0}, 200);
    CHECK(r.converged);
    CHECK(r.theta_hat[0] == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(r.value == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  }
  SUBCASE("1-D, finite-difference fallback") {
    ObjFn f = [](const std::vector<double>& x) {
      return -(x[0] - 3.0) * (x[0] - 3.0);
    };
    const FitResult r = maximize_bfgs(f, GradFn(), {-5.0}, 200);
    CHECK(r.converged);
    CHECK(r.theta_hat[0] == doctest::Approx(3.0).epsilon(1e-5));
  }
  SUBCASE("2-D with cross term") {
    ObjFn f = [](const std::vector<double>& v) {
      const double a = v[0] - 1.0, b = v[1] + 0.5;
      return -(a * a) - 2.0 * b * b - 0.5 * a * b;
    };
    GradFn g = [](const std::vector<double>& v) {
      const double a = v[0] - 1.0, b = v[1] + 0.5;
      return std::vector<double>{-2.0 * a - 0.5 * b, -4.0 * b - 0.5 * a};
    };
    const FitResult r = maximize_bfgs(f, g, {4.0, 4.0}, 500);
    CHECK(r.converged);
    CHECK(r.theta_hat[0] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(r.theta_hat[1] == doctest::Approx(-0.5).epsilon(1e-5));
    CHECK(r.grad_norm < 1e-4);
  }
  SUBCASE("non-finite start is reported, not thrown") {
    ObjFn f = [](const std::vector<double>&) {
      return -std::numeric_limits<double>::infinity();
    };
    const FitResult r = maximize_bfgs(f, GradFn(), {0.0}, 50);
    CHECK_FALSE(r.converged);
    CHECK(r.value == -std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("init_random: deterministic prior draws with the right moments") {
  PriorSpec prior;
  prior.mean = {1.5, -2.0};
  prior.stdev = {0.5, 3.0};
  const auto a = init_random(prior, 99);
  const auto b = init_random(prior, 99);
  CHECK(a == b);
  CHECK(init_random(prior, 100) != a);

  const int draws = 20000;
  double s0 = 0.0, s1 = 0.0, q0 = 0.0, q1 = 0.0;
  for (int k = 0; k < draws; ++k) {
    const auto v = init_random(prior, 5000 + static_cast<std::uint64_t>(k));
    s0 += v[0];
    s1 += v[1];
    q0 += v[0] * v[0];
    q1 += v[1] * v[1];
  }
  const double m0 = s0 / draws, m1 = s1 / draws;
  CHECK(m0 == doctest::Approx(1.5).epsilon(0.02));
  CHECK(m1 == doctest::Approx(-2.0).epsilon(0.05));
  CHECK(std::sqrt(q0 / draws - m0 * m0) == doctest::Approx(0.5).epsilon(0.03));
  CHECK(std::sqrt(q1 / draws - m1 * m1) == doctest::Approx(3.0).epsilon(0.03));
}

TEST_CASE("optimize on the linear benchmark reaches the pinned optima") {
  GPModel model{parse_kernel("SE")};
  const PriorSpec prior = build_prior(model.expr);
  const Dataset d = linear_benchmark_dataset();

  const FitResult mll = optimize(model, prior, d, Objective::MLL, 5, 1000, 0);
  CHECK(mll.converged);
  CHECK(mll.value == doctest::Approx(-5.287).epsilon(2e-4));

  const FitResult map = optimize(model, prior, d, Objective::MAP, 5, 1000, 0);
  CHECK(map.converged);
  CHECK(map.value == doctest::Approx(-9.174).epsilon(2e-4));
  CHECK(map.theta_hat[0] == doctest::Approx(0.50152507).epsilon(1e-3));
  CHECK(map.theta_hat[1] == doctest::Approx(-2.43337888).epsilon(1e-3));
}

TEST_CASE("optimize: determinism, restart monotonicity, validation") {
  GPModel model{parse_kernel("SE")};
  const PriorSpec prior = build_prior(model.expr);
  const Dataset d = linear_benchmark_dataset();

  const FitResult a = optimize(model, prior, d, Objective::MAP, 3, 400, 7);
  const FitResult b = optimize(model, prior, d, Objective::MAP, 3, 400, 7);
  CHECK(a.value == b.value);
  CHECK(a.theta_hat == b.theta_hat);
  CHECK(a.restart_index == b.restart_index);

  const FitResult one = optimize(model, prior, d, Objective::MAP, 1, 400, 7);
  const FitResult five = optimize(model, prior, d, Objective::MAP, 5, 400, 7);
  CHECK(five.value >= one.value);

  CHECK_THROWS_AS(optimize(model, prior, d, Objective::MAP, 0, 400, 7),
                  ConfigError);
}
