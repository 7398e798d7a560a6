#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "ldlab/rng.hpp"
#include "ldlab/severity.hpp"
#include "ldlab/variation.hpp"

using Catch::Approx;
using namespace ldlab;

TEST_CASE("pareto closed forms") {
  const SeverityModel x{Pareto{2.0, 1.0}};
  REQUIRE(x.tail(2.0) == Approx(0.25).epsilon(1e-12));
  REQUIRE(x.tail(0.5) == 1.0);  // below the scale point
  // P(3 < X <= 4) = 1/9 - 1/16 = 7/144
  REQUIRE(x.interval(3.0, Window::of(1.0)) == Approx(7.0 / 144.0).epsilon(1e-12));
  // P(1 < X <= 1.5) = 1 - (2/3)^2 = 5/9
  REQUIRE(x.interval(1.0, Window::of(0.5)) == Approx(5.0 / 9.0).epsilon(1e-12));
  REQUIRE(x.interval(3.0, Window::unbounded()) == Approx(1.0 / 9.0).epsilon(1e-12));
  REQUIRE(x.mean() == Approx(2.0).epsilon(1e-12));
  REQUIRE(x.nonnegative());

  // moments E X^r exist iff r < alpha; E X^1.5 = 2 * 1 / (2 - 1.5) = 4
  REQUIRE(std::isinf(x.plus_moment(2.0)));
  REQUIRE(std::isinf(x.plus_moment(3.0)));
  REQUIRE(x.plus_moment(1.5) == Approx(4.0).epsilon(1e-12));
  REQUIRE_THROWS_AS(x.plus_moment(1.0), std::invalid_argument);
  REQUIRE(std::isinf(SeverityModel{Pareto{1.0, 1.0}}.mean()));
}

TEST_CASE("step tail closed forms") {
  const SeverityModel x{StepPareto{1.0}};
  // tail(z) = 2^{-floor(log2 z)} for z >= 1
  REQUIRE(x.tail(0.5) == 1.0);
  REQUIRE(x.tail(1.5) == Approx(1.0).epsilon(1e-12));
  REQUIRE(x.tail(2.0) == Approx(0.5).epsilon(1e-12));
  REQUIRE(x.tail(7.9) == Approx(0.25).epsilon(1e-12));
  // P(8 < X <= 16) = 2^-3 - 2^-4 = 0.0625
  REQUIRE(x.interval(8.0, Window::of(8.0)) == Approx(0.0625).epsilon(1e-12));
  REQUIRE(std::isinf(x.mean()));  // alpha = 1: harmonic octave sum diverges
  REQUIRE(x.nonnegative());
}

TEST_CASE("lattice severity moments") {
  LatticePmf p;
  p.h = 1.0;
  p.masses = {0.0, 0.5, 0.5};
  const SeverityModel x{p};
  REQUIRE(x.mean() == Approx(1.5).epsilon(1e-12));
  REQUIRE(x.plus_moment(2.0) == Approx(2.5).epsilon(1e-12));
  REQUIRE(x.tail(1.0) == Approx(0.5).epsilon(1e-12));
  REQUIRE(x.interval(0.0, Window::of(1.0)) == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("shifted severity translates tails and moments") {
  const auto base = SeverityModel{Pareto{2.0, 1.0}};
  const auto down = SeverityModel::shifted(-1.0, base);
  REQUIRE(down.tail(1.0) == Approx(base.tail(2.0)).epsilon(1e-12));
  REQUIRE(down.interval(2.0, Window::of(1.0)) ==
          Approx(base.interval(3.0, Window::of(1.0))).epsilon(1e-12));
  REQUIRE(down.mean() == Approx(1.0).epsilon(1e-12));
  REQUIRE(down.nonnegative());  // support slides down to [0, inf), still nonnegative
  REQUIRE_FALSE(SeverityModel::shifted(-2.0, base).nonnegative());

  const auto up = SeverityModel::shifted(2.5, base);
  REQUIRE(up.nonnegative());
  REQUIRE(up.mean() == Approx(4.5).epsilon(1e-12));

  // same engine state => shifted draw is exactly inner draw + c
  std::mt19937_64 a = make_engine({7, 1, 0});
  std::mt19937_64 b = a;
  REQUIRE(up.sample(a) == Approx(base.sample(b) + 2.5).margin(1e-12));
}

TEST_CASE("discretize rounding modes bracket the true tail") {
  const SeverityModel x{Pareto{2.0, 1.0}};
  const double h = 0.5;
  const std::size_t K = 8;  // grid end 4.0, deliberately short to exercise the lump

  DiscretizeReport up_rep, down_rep, mid_rep;
  const LatticePmf up = x.discretize(h, K, Rounding::up, &up_rep);
  const LatticePmf down = x.discretize(h, K, Rounding::down, &down_rep);
  const LatticePmf mid = x.discretize(h, K, Rounding::midpoint, &mid_rep);

  REQUIRE(up_rep.dominance == +1);
  REQUIRE(down_rep.dominance == -1);
  REQUIRE(mid_rep.dominance == 0);

  // residual beyond the grid is reported and lumped, never dropped
  REQUIRE(up_rep.residual_tail == Approx(x.tail(4.0)).epsilon(1e-12));
  REQUIRE(down_rep.residual_tail == Approx(x.tail(4.5)).epsilon(1e-12));
  REQUIRE(mid_rep.residual_tail == Approx(x.tail(4.25)).epsilon(1e-12));
  REQUIRE(up.total() == Approx(1.0).margin(1e-12));
  REQUIRE(down.total() == Approx(1.0).margin(1e-12));
  REQUIRE(mid.total() == Approx(1.0).margin(1e-12));

  // ceil(X) >= X and floor(X) <= X, so the lattice tails sandwich the truth
  const LatticeTail up_tail(up), down_tail(down);
  for (double z : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    REQUIRE(up_tail.tail(z) >= x.tail(z) - 1e-12);
    REQUIRE(down_tail.tail(z) <= x.tail(z) + 1e-12);
  }

  // up rounding by construction: m_k = P((k-1)h < X <= kh)
  REQUIRE(up.masses[3] == Approx(x.interval(1.0, Window::of(0.5))).epsilon(1e-12));

  REQUIRE_THROWS_AS(x.discretize(0.0, K, Rounding::up), std::invalid_argument);
  REQUIRE_THROWS_AS(x.discretize(h, 0, Rounding::up), std::invalid_argument);
  // mass below the origin cannot be gridded
  REQUIRE_THROWS_AS(SeverityModel::shifted(-2.0, x).discretize(h, K, Rounding::up),
                    std::invalid_argument);
}

TEST_CASE("window maps of monotone tails are almost decreasing with constant 1") {
  const SeverityModel pareto{Pareto{2.0, 1.0}};
  const SeverityModel step{StepPareto{1.0}};
  const auto grid = log_grid(2.0, 100.0, 400);
  REQUIRE(pareto.almost_decreasing_constant(Window::unbounded(), 2.0, grid) ==
          Approx(1.0).epsilon(1e-12));
  REQUIRE(pareto.almost_decreasing_constant(Window::of(1.0), 2.0, grid) ==
          Approx(1.0).epsilon(1e-12));
  REQUIRE(step.almost_decreasing_constant(Window::unbounded(), 2.0, grid) ==
          Approx(1.0).epsilon(1e-12));

  REQUIRE_THROWS_AS(pareto.almost_decreasing_constant(Window::of(1.0), 2.0, {}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(pareto.almost_decreasing_constant(Window::of(1.0), 200.0, grid),
                    std::invalid_argument);  // no probe point >= x0
}

TEST_CASE("inverse-cdf sampling hits the analytic law") {
  // Pareto(3,1): mean 1.5, var = 3 - 1.5^2 = 0.75; 40000 draws, 4 sigma gate
  const SeverityModel x{Pareto{3.0, 1.0}};
  std::mt19937_64 eng = make_engine({20260819, 2, 0});
  const int n = 40000;
  double sum = 0.0;
  int beyond2 = 0;
  for (int i = 0; i < n; ++i) {
    const double d = x.sample(eng);
    REQUIRE(d >= 1.0);
    sum += d;
    if (d > 2.0) ++beyond2;
  }
  REQUIRE(sum / n == Approx(1.5).margin(4.0 * std::sqrt(0.75 / n)));
  // P(X > 2) = 1/8
  const double p = 1.0 / 8.0;
  REQUIRE(static_cast<double>(beyond2) / n == Approx(p).margin(4.0 * std::sqrt(p * (1 - p) / n)));
}

TEST_CASE("lattice sampling frequencies match the masses") {
  LatticePmf pmf;
  pmf.h = 0.5;
  pmf.masses = {0.0, 0.25, 0.75};
  const SeverityModel x{pmf};
  std::mt19937_64 eng = make_engine({20260819, 2, 1});
  const int n = 20000;
  int at_half = 0;
  for (int i = 0; i < n; ++i) {
    const double d = x.sample(eng);
    REQUIRE((d == Approx(0.5) || d == Approx(1.0)));  // only the charged cells
    if (d == Approx(0.5)) ++at_half;
  }
  REQUIRE(static_cast<double>(at_half) / n ==
          Approx(0.25).margin(4.0 * std::sqrt(0.25 * 0.75 / n)));
}

TEST_CASE("describe names the family and parameters") {
  const SeverityModel pareto{Pareto{2.0, 1.0}};
  const SeverityModel step{StepPareto{1.0}};
  REQUIRE_THAT(pareto.describe(), Catch::Matchers::ContainsSubstring("pareto"));
  REQUIRE_THAT(step.describe(), Catch::Matchers::ContainsSubstring("step"));
}
