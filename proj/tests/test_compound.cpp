#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ldlab/compound.hpp"

using Catch::Approx;
using namespace ldlab;

namespace {
LatticePmf lat(double h, std::vector<double> m) {
  LatticePmf p;
  p.h = h;
  p.masses = std::move(m);
  return p;
}
}  // namespace

TEST_CASE("poisson(2) aggregate atoms by hand") {
  // f = {1:.5, 2:.5}: g0 = e^-2, g1 = .5*2*e^-2 = e^-2,
  // g2 = e^-2*(2/2) * ... recursion: g2 = 1.5 e^-2, g3 = (7/6) e^-2
  const LatticePmf g = panjer_pmf(CountSpec::poisson(2.0), lat(1.0, {0.0, 0.5, 0.5}), 16);
  const double e2 = std::exp(-2.0);
  REQUIRE(g.h == 1.0);
  REQUIRE(g.masses[0] == Approx(0.1353352832366127).epsilon(1e-12));
  REQUIRE(g.masses[1] == Approx(e2).epsilon(1e-12));
  REQUIRE(g.masses[2] == Approx(0.20300292485491903).epsilon(1e-12));
  REQUIRE(g.masses[3] == Approx(0.15789116377604595).epsilon(1e-12));
}

TEST_CASE("poisson(1) with unit jumps reproduces the poisson pmf") {
  // S = N exactly, so g_k = e^-1 / k!
  const LatticePmf g = panjer_pmf(CountSpec::poisson(1.0), lat(1.0, {0.0, 1.0}), 24);
  REQUIRE(g.masses[0] == Approx(0.36787944117144233).epsilon(1e-12));
  REQUIRE(g.masses[2] == Approx(0.18393972058572117).epsilon(1e-12));
  double fact = 1.0;
  for (int k = 1; k <= 12; ++k) {
    fact *= k;
    REQUIRE(g.masses[static_cast<std::size_t>(k)] == Approx(std::exp(-1.0) / fact).epsilon(1e-12));
  }
}

TEST_CASE("recursion agrees with the convolution mixture across families") {
  const LatticePmf f = lat(0.5, {0.1, 0.4, 0.3, 0.2});
  const std::size_t K = 128;
  for (const CountSpec& c : {CountSpec::poisson(3.0), CountSpec::negbin(2.5, 1.2),
                             CountSpec::binomial(12, 0.35)}) {
    const LatticePmf a = panjer_pmf(c, f, K);
    const LatticePmf b = convolution_pmf(c, f, K, 1e-14);
    double gap = 0.0;
    for (std::size_t k = 0; k <= K; ++k) gap = std::max(gap, std::abs(a.masses[k] - b.masses[k]));
    INFO(c.describe());
    REQUIRE(gap <= 1e-12);
  }
}

TEST_CASE("count spec moments and zero atoms") {
  REQUIRE(CountSpec::poisson(2.0).mean() == Approx(2.0));
  REQUIRE(CountSpec::negbin(3.0, 1.5).mean() == Approx(4.5));
  REQUIRE(CountSpec::binomial(20, 0.3).mean() == Approx(6.0));
  // P(S=0) = E f0^N: poisson e^{-lam(1-f0)}
  REQUIRE(CountSpec::poisson(2.0).mass_at_zero(0.5) == Approx(std::exp(-1.0)).epsilon(1e-12));
  // pmf sums to one
  const CountSpec nb = CountSpec::negbin(0.7, 2.0);
  double total = 0.0;
  for (std::int64_t k = 0; k < 4000; ++k) total += nb.pmf(k);
  REQUIRE(total == Approx(1.0).epsilon(1e-10));

  REQUIRE_THROWS_AS(CountSpec::poisson(0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(CountSpec::negbin(0.0, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(CountSpec::negbin(1.0, -2.0), std::invalid_argument);
  REQUIRE_THROWS_AS(CountSpec::binomial(0, 0.5), std::invalid_argument);
  REQUIRE_THROWS_AS(CountSpec::binomial(5, 1.0), std::invalid_argument);
}

TEST_CASE("n-fold convolution of a two-atom law") {
  // {1:.5, 2:.5} twice: atoms 2,3,4 with masses .25, .5, .25
  const LatticePmf g = nfold_pmf(lat(1.0, {0.0, 0.5, 0.5}), 2, 8);
  REQUIRE(g.masses[0] == 0.0);
  REQUIRE(g.masses[2] == Approx(0.25).epsilon(1e-14));
  REQUIRE(g.masses[3] == Approx(0.5).epsilon(1e-14));
  REQUIRE(g.masses[4] == Approx(0.25).epsilon(1e-14));
  REQUIRE_THROWS_AS(nfold_pmf(lat(1.0, {0.5, 0.5}), 0, 8), std::invalid_argument);
}

TEST_CASE("aggregate tail lumps the truncation remainder") {
  // truncate poisson(2) + {1:.5,2:.5} at K=3; remainder must surface in tails
  const LatticePmf g = panjer_pmf(CountSpec::poisson(2.0), lat(1.0, {0.0, 0.5, 0.5}), 3);
  const LatticeTail v = aggregate_tail(g);
  const double kept = g.masses[0] + g.masses[1] + g.masses[2] + g.masses[3];
  REQUIRE(v.tail(3.0) == Approx(1.0 - kept).epsilon(1e-12));
  REQUIRE(v.tail(-0.5) == Approx(1.0).margin(1e-12));
  // finite windows inside the grid never see the lump
  REQUIRE(v.window_mass(0.0, Window::of(2.0)) == Approx(g.masses[1] + g.masses[2]).epsilon(1e-12));
}

TEST_CASE("centered window probability via the aggregate pmf") {
  // mu = 1.5, lambda = 2: P(S - 3 in (-1, 0]) = P(S in (2, 3]) = g3
  const LatticePmf g = panjer_pmf(CountSpec::poisson(2.0), lat(1.0, {0.0, 0.5, 0.5}), 64);
  const LatticeTail v = aggregate_tail(g);
  const double center = 1.5 * 2.0;
  REQUIRE(v.window_mass(-1.0 + center, Window::of(1.0)) ==
          Approx(0.15789116377604595).epsilon(1e-12));
}
