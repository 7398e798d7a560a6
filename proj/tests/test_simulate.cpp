#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ldlab/compound.hpp"
#include "ldlab/simulate.hpp"

using Catch::Approx;
using Catch::Matchers::ContainsSubstring;
using namespace ldlab;

namespace {
LatticePmf lat(double h, std::vector<double> m) {
  LatticePmf p;
  p.h = h;
  p.masses = std::move(m);
  return p;
}
}  // namespace

TEST_CASE("alias table reproduces the masses") {
  const std::vector<double> masses = {0.1, 0.0, 0.6, 0.3};
  const AliasTable table(masses);
  std::mt19937_64 eng = make_engine({1, 2, 3});
  std::vector<int> counts(masses.size(), 0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++counts[table.draw(eng)];
  REQUIRE(counts[1] == 0);
  for (std::size_t k = 0; k < masses.size(); ++k) {
    const double p = masses[k];
    if (p == 0.0) continue;
    REQUIRE(static_cast<double>(counts[k]) / n ==
            Approx(p).margin(4.0 * std::sqrt(p * (1.0 - p) / n)));
  }
}

TEST_CASE("poisson table inversion matches mean and variance") {
  const PoissonTable table(12.0);
  std::mt19937_64 eng = make_engine({4, 5, 6});
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = static_cast<double>(table.draw(eng));
    sum += d;
    sq += d * d;
  }
  const double mean = sum / n;
  REQUIRE(mean == Approx(12.0).margin(4.0 * std::sqrt(12.0 / n)));
  REQUIRE(sq / n - mean * mean == Approx(12.0).margin(0.5));
}

TEST_CASE("empty sum is exactly zero") {
  // floor(rate * t) = 0 claims
  const SeverityModel sev{Pareto{2.0, 1.0}};
  const CountingModel det(DeterministicCount{1.0});
  PathStreams s = make_path_streams(99);
  REQUIRE(simulate_random_sum(sev, det, 0.5, s) == 0.0);
}

TEST_CASE("unit severities make the random sum count claims") {
  const SeverityModel sev{lat(1.0, {0.0, 1.0})};
  const CountingModel counting(HomPoisson{2.0});
  for (std::uint64_t chunk = 0; chunk < 4; ++chunk) {
    PathStreams s = make_path_streams(20260819, chunk);
    PathStreams probe = s;  // same engine state
    const double sum = simulate_random_sum(sev, counting, 7.0, s);
    const auto n = counting.sample(7.0, probe.count);
    REQUIRE(sum == Approx(static_cast<double>(n)).margin(1e-12));
  }
}

TEST_CASE("path mean matches the compound mean within 4 sigma") {
  // lambda = 30, severity {1:.5, 2:.5}: E S = 45, Var S = 30 * 2.5 = 75
  const SeverityModel sev{lat(1.0, {0.0, 0.5, 0.5})};
  const CountingModel counting(HomPoisson{3.0});
  PathStreams s = make_path_streams(7);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += simulate_random_sum(sev, counting, 10.0, s);
  REQUIRE(sum / n == Approx(45.0).margin(4.0 * std::sqrt(75.0 / n)));
}

TEST_CASE("shifted paths equal plain paths plus c times the count") {
  const SeverityModel sev{lat(0.5, {0.0, 0.5, 0.5})};
  const CountingModel counting(HomPoisson{2.0});
  for (double c : {-0.5, 0.0, 2.5}) {
    PathStreams a = make_path_streams(11, 3);
    PathStreams b = a;
    PathStreams probe = a;
    const double shifted = simulate_shifted_sum(sev, c, counting, 5.0, a);
    const double plain = simulate_random_sum(sev, counting, 5.0, b);
    const auto n = counting.sample(5.0, probe.count);
    REQUIRE(shifted == Approx(plain + c * static_cast<double>(n)).margin(1e-9));
  }
}

TEST_CASE("surplus paths subtract the premium exactly") {
  const SeverityModel sev{lat(0.5, {0.0, 0.5, 0.5})};
  const CountingModel counting(HomPoisson{2.0});
  const auto linear = PremiumProcess::deterministic_linear(1.5);
  PathStreams a = make_path_streams(13);
  PathStreams b = a;
  const double surplus = simulate_claim_surplus(sev, counting, linear, 8.0, a);
  const double claims = simulate_random_sum(sev, counting, 8.0, b);
  REQUIRE(surplus == Approx(claims - 12.0).margin(1e-12));
  REQUIRE(linear.b(8.0) == Approx(12.0));

  // compound premium: E Y(t) = rate * t * mean(jump)
  const auto cp = PremiumProcess::compound_poisson(2.0, lat(1.0, {0.0, 0.25, 0.75}));
  REQUIRE(cp.b(10.0) == Approx(35.0).epsilon(1e-12));
  std::mt19937_64 eng = make_engine({17, 3, 0});
  const int n = 50000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += cp.sample(10.0, eng);
  // Var Y = rate * t * E J^2 = 20 * (0.25 + 0.75*4) = 65
  REQUIRE(sum / n == Approx(35.0).margin(4.0 * std::sqrt(65.0 / n)));

  REQUIRE_THROWS_AS(PremiumProcess::deterministic_linear(-1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(PremiumProcess::compound_poisson(1.0, lat(1.0, {0.5, 0.5, 0.25})),
                    std::invalid_argument);
}

TEST_CASE("centered interval estimate agrees with the exact aggregate") {
  // lambda = 30, {1:.5, 2:.5}: P(S - 45 in (2.5, 3.5]) = g48 from the recursion
  const SeverityModel sev{lat(1.0, {0.0, 0.5, 0.5})};
  const CountingModel counting(HomPoisson{3.0});
  const LatticePmf g = panjer_pmf(CountSpec::poisson(30.0), lat(1.0, {0.0, 0.5, 0.5}), 400);
  const double exact = g.masses[48];

  const auto est = estimate_centered_interval(sev, counting, 10.0, 2.5, Window::of(1.0), 200000,
                                              20260819);
  REQUIRE(est.n_samples == 200000);
  REQUIRE(est.se > 0.0);
  REQUIRE(est.estimate == Approx(exact).margin(4.0 * est.se));

  // replay is bit-identical; a new seed moves the estimate
  const auto again = estimate_centered_interval(sev, counting, 10.0, 2.5, Window::of(1.0), 200000,
                                                20260819);
  REQUIRE(again.estimate == est.estimate);

  // impossible window: zero hits, zero stderr
  const auto zero = estimate_centered_interval(sev, counting, 10.0, 1e6, Window::of(1.0), 10000, 1);
  REQUIRE(zero.estimate == 0.0);
  REQUIRE(zero.se == 0.0);
}

TEST_CASE("chunked tallies add up exactly") {
  const LatticePmf sev = lat(0.5, {0.0, 0.5, 0.5});
  const std::vector<CellWindow> wins = {{100, 140}, {140, INT64_MAX}};
  const std::uint64_t samples = 150000;  // 2 full chunks + remainder

  const McTally full = mc_window_hits(sev, 50.0, 0, nullptr, wins, samples, 42);
  REQUIRE(full.samples == samples);

  const McTally head = mc_window_hits_chunks(sev, 50.0, 0, nullptr, wins, samples, 42, 0, 1);
  const McTally tail = mc_window_hits_chunks(sev, 50.0, 0, nullptr, wins, samples, 42, 1, 3);
  REQUIRE(head.samples + tail.samples == samples);
  for (std::size_t w = 0; w < wins.size(); ++w)
    REQUIRE(head.hits[w] + tail.hits[w] == full.hits[w]);
}

TEST_CASE("premium law of large numbers trace") {
  // compound poisson, rate 1, unit jumps: P(|Y/t - 1| > 0.1) on a doubling grid
  const auto cp = PremiumProcess::compound_poisson(1.0, lat(1.0, {0.0, 1.0}));
  const std::vector<double> grid = {50.0, 100.0, 200.0, 400.0};
  const auto rep = check_premium_lln(cp, grid, 0.1);
  // exact two-sided poisson tails P(Y <= 0.9t - 1) + P(Y >= 1.1t + 1);
  // note 1.1*t is an exact integer here, so Y = 1.1t sits inside the band
  const std::vector<double> want = {0.436569831931495, 0.29348352314100246,
                                    0.1469735686561794, 0.04280314752945852};
  REQUIRE(rep.values.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i)
    REQUIRE(rep.values[i] == Approx(want[i]).epsilon(1e-9));
  // 0.042803 <= 0.436570 / 10: the doubling grid just clears the /10 gate
  REQUIRE(rep.pass);

  // a shorter horizon leaves last/first ~ 0.34 and must miss the gate
  const auto shorter = check_premium_lln(cp, {50.0, 100.0, 200.0}, 0.1);
  REQUIRE_FALSE(shorter.pass);

  const auto longer = check_premium_lln(cp, {50.0, 100.0, 200.0, 400.0, 800.0}, 0.1);
  REQUIRE(longer.values.back() == Approx(0.004433958514391792).epsilon(1e-9));
  REQUIRE(longer.pass);

  // deterministic premium concentrates trivially
  const auto det = check_premium_lln(PremiumProcess::deterministic_linear(2.0), grid, 0.1);
  REQUIRE(det.pass);
  for (double v : det.values) REQUIRE(v == 0.0);
}

TEST_CASE("premium-to-claims ratio estimate") {
  const auto cp = PremiumProcess::compound_poisson(1.0, lat(1.0, {0.0, 1.0}));
  const CountingModel claims(HomPoisson{2.0});
  // b(t)/lambda(t) = t / 2t = 0.5 at every t
  REQUIRE(nu_estimate(cp, claims, {50.0, 100.0, 200.0}) == Approx(0.5).epsilon(1e-12));
}
