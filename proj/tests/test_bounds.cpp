#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "ldlab/bounds.hpp"

using Catch::Approx;
using namespace ldlab;

TEST_CASE("spot bound value by hand") {
  // v=1, x=100, n=5, T=inf, mu+=2, c1=1:
  // head = 5 * (1/100)^2 = 5e-4; slack = (2e) * (5/100) = e/10
  const SeverityModel sev{Pareto{2.0, 1.0}};
  const auto b = window_sum_bound(sev, 2.0, 1.0, 5.0, 100.0, 1.0, Window::unbounded());
  REQUIRE(b.head == Approx(5e-4).epsilon(1e-12));
  REQUIRE(b.slack == Approx(2.0 * std::exp(1.0) / 20.0).epsilon(1e-12));
  REQUIRE(b.value() == Approx(0.2723281828459045).epsilon(1e-12));

  // v=0.5 square-roots the slack decay and halves the head argument
  const auto half = window_sum_bound(sev, 2.0, 1.0, 5.0, 100.0, 0.5, Window::unbounded());
  REQUIRE(half.head == Approx(5.0 * std::pow(1.0 / 50.0, 2.0)).epsilon(1e-12));
  REQUIRE(half.slack == Approx(std::pow(2.0 * std::exp(1.0), 2.0) * std::pow(0.05, 2.0)).epsilon(1e-12));
}

TEST_CASE("degenerate and invalid bound arguments") {
  const SeverityModel sev{Pareto{2.0, 1.0}};
  // n = 0 terms: zero probability, zero bound
  const auto zero = window_sum_bound(sev, 2.0, 1.0, 0.0, 100.0, 1.0, Window::unbounded());
  REQUIRE(zero.head == 0.0);
  REQUIRE(zero.slack == 0.0);

  REQUIRE_THROWS_AS(window_sum_bound(sev, 2.0, 1.0, 5.0, 100.0, 0.0, Window::unbounded()),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(window_sum_bound(sev, 2.0, 1.0, 5.0, 100.0, 1.5, Window::unbounded()),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(window_sum_bound(sev, 2.0, 1.0, 5.0, 0.0, 1.0, Window::unbounded()),
                    std::invalid_argument);
  // E X^+ must be a finite positive number for the slack term
  REQUIRE_THROWS_AS(window_sum_bound(sev, 0.0, 1.0, 5.0, 100.0, 1.0, Window::unbounded()),
                    std::domain_error);
  const double inf = std::numeric_limits<double>::infinity();
  REQUIRE_THROWS_AS(window_sum_bound(sev, inf, 1.0, 5.0, 100.0, 1.0, Window::unbounded()),
                    std::domain_error);
  REQUIRE_THROWS_AS(window_sum_bound(sev, 2.0, 0.9, 5.0, 100.0, 1.0, Window::unbounded()),
                    std::invalid_argument);  // c1 < 1 cannot certify
  REQUIRE_THROWS_AS(window_sum_bound(sev, 2.0, 1.0, -1.0, 100.0, 1.0, Window::unbounded()),
                    std::invalid_argument);
}

TEST_CASE("small exhaustive sweep finds no violations") {
  const SeverityModel sev{Pareto{2.0, 1.0}};
  BoundSweepSettings s;
  s.h = 0.5;
  s.grid_end = 256.0;
  s.rounding = Rounding::up;
  s.n_max = 6;
  s.x_lo = 2.0;
  s.x_hi = 50.0;
  s.v_list = {0.5, 1.0};
  s.windows = {Window::of(1.0), Window::unbounded()};

  const auto res = bound_sweep(sev, s);
  REQUIRE(res.violations.empty());
  REQUIRE(res.c1 == Approx(1.0).epsilon(1e-12));
  REQUIRE(res.worst_ratio > 0.0);
  REQUIRE(res.worst_ratio <= 1.0 + 1e-9);
  REQUIRE_FALSE(res.detail.empty());
  REQUIRE(res.mu_hat >= 2.0);  // up-rounded mean dominates the true mean

  // 6 n-values x 2 v x 2 windows rows; 97 lattice x-points in [2, 50] each
  REQUIRE(res.rows.size() == 24);
  std::uint64_t total = 0;
  for (const auto& r : res.rows) {
    REQUIRE(r.checks == 97);
    REQUIRE(r.violations == 0);
    REQUIRE(r.worst_ratio <= res.worst_ratio + 1e-15);
    total += r.checks;
  }
  REQUIRE(total == res.checks);
}
