#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "ldlab/severity.hpp"
#include "ldlab/window.hpp"

namespace ldlab {

// Poisson process with intensity `rate`: N(t) ~ Poisson(rate*t).
struct HomPoisson {
  double rate;
};

// Poisson with a randomly scaled intensity: N(t) | Theta ~ Poisson(Theta*rate*t),
// Theta on {theta_j} with weights {weight_j} and mean 1 (so lambda(t) = rate*t).
struct MixedPoisson {
  double rate;
  std::vector<double> theta;
  std::vector<double> weight;
};

// N(t) = floor(rate*t), no randomness.
struct DeterministicCount {
  double rate;
};

struct SeriesStatus {
  bool converged = true;
  std::uint64_t terms = 0;
};

struct ConditionReport {
  std::string condition;  // "truncated_moment_growth" | "lower_tail_decay" | "count_concentration" | "premium_lln"
  std::vector<double> t_grid;
  std::vector<double> values;              // primary per-t trace (see detail for its definition)
  std::vector<std::vector<double>> extra;  // secondary traces (concentration triple)
  double p = 0.0, delta = 0.0, eps = 0.0;
  bool pass = false;
  std::string detail;
};

class CountingModel {
 public:
  CountingModel(HomPoisson m);
  CountingModel(MixedPoisson m);  // validates weights >= 0, sum 1, mean(Theta) = 1 within 1e-9
  CountingModel(DeterministicCount m);

  double lambda(double t) const;  // E N(t) = rate*t for all three families
  std::int64_t sample(double t, std::mt19937_64& eng) const;
  std::string describe() const;

  bool deterministic() const;
  const HomPoisson* hom_poisson() const;

  // Poisson-mixture decomposition of N(t): (weight_j, mean_j) pairs. A plain
  // Poisson is the single pair (1, rate*t); deterministic counts throw.
  std::vector<std::pair<double, double>> components(double t) const;

  // E[N(t)^p; N(t) > (1+delta)*lambda(t)] by exact series, each mixing component
  // seeded at its own mode in log space. Hard cap 1e6 terms: exceeding it sets
  // status.converged = false (divergent-moment signal), returning the partial sum.
  double truncated_p_moment(double t, double p, double delta, SeriesStatus* status = nullptr) const;

  // P(N(t) <= (1-delta)*lambda(t)) by exact pmf summation.
  double lower_tail(double t, double delta) const;

 private:
  std::variant<HomPoisson, MixedPoisson, DeterministicCount> family_;
};

// Growth check for the normalized truncated moment v(t) = E[N^p; N > (1+d)L]/L:
// passes iff every series converged and v is nonincreasing (1e-9 slack) over the
// top half of the t-grid.
ConditionReport check_truncated_moment_growth(const CountingModel& model, double p, double delta,
                                              const std::vector<double>& t_grid);

// Decay check for w(t) = P(N <= (1-d)L)/(L * F(L + Delta)): passes iff w is
// nonincreasing over the top half and last <= first/10.
ConditionReport check_lower_tail_decay(const CountingModel& model, const SeverityModel& severity,
                                       Window w, double delta, const std::vector<double>& t_grid);

// Concentration triple for xi = N(t)/lambda(t):
//   P(|xi-1| > eps), E[xi; xi > 1+eps], E[xi; xi <= 1-delta].
// The three trends must agree: pass iff all decay (last <= first/10); a consistent
// triple-fail (all stuck above first/2) is reported in detail.
ConditionReport check_count_concentration(const CountingModel& model, const std::vector<double>& t_grid,
                                          double eps, double delta);

}  // namespace ldlab
