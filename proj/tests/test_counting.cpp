#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ldlab/counting.hpp"
#include "ldlab/rng.hpp"
#include "ldlab/severity.hpp"

using Catch::Approx;
using Catch::Matchers::ContainsSubstring;
using namespace ldlab;

namespace {
// dyadic mixture theta_j = 2^j/3, q_j = 3 * 4^-j: mass 1 - 4^-J, mean 1 - 2^-J
// (inside the model's 1e-9 closure at J = 32), second moment J/3 -> inf in J.
// Every octave contributes ~t^2/3 to the truncated second moment with no decay,
// and the per-component series need ~2^{j/2} sqrt(t) terms, so the 1e6-term
// budget blows before the sum settles.
MixedPoisson heavy_mixture(int J) {
  MixedPoisson m;
  m.rate = 1.0;
  for (int j = 1; j <= J; ++j) {
    m.theta.push_back(std::pow(2.0, j) / 3.0);
    m.weight.push_back(3.0 * std::pow(4.0, -j));
  }
  return m;
}
}  // namespace

TEST_CASE("counting model construction and validation") {
  REQUIRE(CountingModel(HomPoisson{2.0}).lambda(10.0) == Approx(20.0));
  REQUIRE(CountingModel(DeterministicCount{1.5}).lambda(2.0) == Approx(3.0));
  REQUIRE_THROWS_AS(CountingModel(HomPoisson{0.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(CountingModel(DeterministicCount{-1.0}), std::invalid_argument);

  MixedPoisson bad;
  bad.rate = 1.0;
  bad.theta = {0.5, 1.5};
  bad.weight = {0.5};  // size mismatch
  REQUIRE_THROWS_AS(CountingModel(bad), std::invalid_argument);
  bad.weight = {0.3, 0.3};  // mass 0.6
  REQUIRE_THROWS_AS(CountingModel(bad), std::invalid_argument);
  bad.weight = {0.25, 0.75};  // mean 1.25
  REQUIRE_THROWS_AS(CountingModel(bad), std::invalid_argument);
  bad.weight = {0.5, 0.5};  // mean 1: valid
  REQUIRE_NOTHROW(CountingModel(bad));
}

TEST_CASE("poisson mixture decomposition") {
  const CountingModel hom(HomPoisson{2.0});
  const auto comps = hom.components(5.0);
  REQUIRE(comps.size() == 1);
  REQUIRE(comps[0].first == Approx(1.0));
  REQUIRE(comps[0].second == Approx(10.0));

  MixedPoisson mix;
  mix.rate = 1.0;
  mix.theta = {0.5, 1.5};
  mix.weight = {0.5, 0.5};
  const auto two = CountingModel(mix).components(4.0);
  REQUIRE(two.size() == 2);
  REQUIRE(two[0].second == Approx(2.0));  // 0.5 * 1.0 * 4
  REQUIRE(two[1].second == Approx(6.0));

  REQUIRE_THROWS_AS(CountingModel(DeterministicCount{1.0}).components(1.0), std::logic_error);
}

TEST_CASE("truncated p-moment exact series") {
  // E[N^2; N > 15] for N ~ Poisson(10) = 14.388142467416 (independent series)
  const CountingModel hom(HomPoisson{1.0});
  SeriesStatus st;
  const double raw = hom.truncated_p_moment(10.0, 2.0, 0.5, &st);
  REQUIRE(st.converged);
  REQUIRE(st.terms > 0);
  REQUIRE(raw == Approx(14.388142467416).epsilon(1e-9));
  REQUIRE(raw / hom.lambda(10.0) == Approx(1.4388142467416).epsilon(1e-9));
}

TEST_CASE("lower tail exact series") {
  // P(N <= 12) for N ~ Poisson(25)
  const CountingModel hom(HomPoisson{1.0});
  REQUIRE(hom.lower_tail(25.0, 0.5) == Approx(0.0031441216081).epsilon(1e-9));
}

TEST_CASE("growth check trend on the homogeneous process") {
  const CountingModel hom(HomPoisson{1.0});
  const std::vector<double> grid = {10.0, 20.0, 40.0, 80.0, 160.0};
  const auto rep = check_truncated_moment_growth(hom, 2.0, 0.3, grid);
  REQUIRE(rep.condition == "truncated_moment_growth");
  const std::vector<double> want = {3.240682, 3.247637, 2.143862, 0.6137922, 0.03348708};
  REQUIRE(rep.values.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i)
    REQUIRE(rep.values[i] == Approx(want[i]).epsilon(1e-6));
  // the full trace rises 10 -> 20; only the top half must be nonincreasing
  REQUIRE(rep.values[1] > rep.values[0]);
  REQUIRE(rep.pass);
}

TEST_CASE("lower-tail decay check against a pareto envelope") {
  const CountingModel hom(HomPoisson{1.0});
  const SeverityModel sev{Pareto{2.0, 1.0}};
  const std::vector<double> grid = {10.0, 20.0, 40.0, 80.0, 160.0};
  const auto rep = check_lower_tail_decay(hom, sev, Window::unbounded(), 0.5, grid);
  const std::vector<double> want = {0.6708596, 0.2162344, 1.473202e-2, 4.59924e-5, 3.074351e-10};
  REQUIRE(rep.values.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i)
    REQUIRE(rep.values[i] == Approx(want[i]).epsilon(1e-6));
  REQUIRE(rep.pass);
}

TEST_CASE("concentration triple flags a non-degenerate mixture") {
  MixedPoisson mix;
  mix.rate = 1.0;
  mix.theta = {0.5, 1.5};
  mix.weight = {0.5, 0.5};
  const CountingModel model(mix);
  const std::vector<double> grid = {10.0, 20.0, 40.0, 80.0, 160.0};
  const auto rep = check_count_concentration(model, grid, 0.2, 0.2);
  // xi = N/lambda splits onto {0.5, 1.5}: limits (1, 0.75, 0.25)
  REQUIRE(rep.values.back() == Approx(0.999613).epsilon(1e-6));
  REQUIRE(rep.extra.size() == 2);
  REQUIRE(rep.extra[0].back() == Approx(0.749544).epsilon(1e-6));
  REQUIRE(rep.extra[1].back() == Approx(0.250000).epsilon(1e-6));
  REQUIRE_FALSE(rep.pass);
  REQUIRE_THAT(rep.detail, ContainsSubstring("triple-fail"));

  // the homogeneous process concentrates: all three functionals decay
  const auto ok = check_count_concentration(CountingModel(HomPoisson{1.0}), grid, 0.2, 0.2);
  REQUIRE(ok.pass);
}

TEST_CASE("divergent second moment hits the series cap") {
  const CountingModel model(heavy_mixture(32));
  const auto rep = check_truncated_moment_growth(model, 2.0, 0.3, {10.0, 20.0, 40.0});
  REQUIRE_FALSE(rep.pass);
  REQUIRE_THAT(rep.detail, ContainsSubstring("cap"));

  SeriesStatus st;
  model.truncated_p_moment(40.0, 2.0, 0.3, &st);
  REQUIRE_FALSE(st.converged);
}

TEST_CASE("count sampling matches the mean") {
  // Poisson(rate t) with rate 2, t 30: mean 60, var 60; 20000 draws, 4 sigma
  const CountingModel hom(HomPoisson{2.0});
  std::mt19937_64 eng = make_engine({20260819, 1, 0});
  const int n = 20000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(hom.sample(30.0, eng));
  REQUIRE(sum / n == Approx(60.0).margin(4.0 * std::sqrt(60.0 / n)));

  // deterministic counts are exact
  const CountingModel det(DeterministicCount{1.5});
  REQUIRE(det.sample(2.0, eng) == 3);
  REQUIRE(det.sample(2.1, eng) == 3);
  REQUIRE(det.deterministic());
}
