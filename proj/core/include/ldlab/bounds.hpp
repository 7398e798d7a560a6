#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ldlab/severity.hpp"
#include "ldlab/window.hpp"

namespace ldlab {

// Uniform upper bound for the n-term partial-sum window probability
//   P(S_n in (x, x+T])  <=  c1 * n * F(v*x + Delta) + (mu_plus * e)^{1/v} * (n/x)^{1/v}
// valid for any v in (0, 1] once x >= x0, where c1 is the almost-decreasing
// constant of the window map at x0 and mu_plus an upper estimate of E X^+.
struct WindowSumBound {
  double head = 0.0;   // c1 * n * F(v*x + Delta)
  double slack = 0.0;  // (mu_plus * e)^{1/v} * (n/x)^{1/v}
  double value() const { return head + slack; }
};

WindowSumBound window_sum_bound(const SeverityModel& severity, double mu_plus, double c1, double n,
                                double x, double v, Window w);

struct BoundSweepSettings {
  double h = 0.5;
  double grid_end = 2048.0;
  Rounding rounding = Rounding::up;
  int n_max = 50;
  double x_lo = 2.0, x_hi = 1000.0;  // every lattice point in [x_lo, x_hi]
  std::vector<double> v_list = {0.5, 1.0};
  std::vector<Window> windows = {Window::of(1.0), Window::unbounded()};
};

struct BoundViolation {
  int n = 0;
  double x = 0.0, v = 0.0, T = 0.0, prob = 0.0, bound = 0.0;
};

// Per-(n, v, T) aggregate over the x sweep.
struct BoundRow {
  int n = 0;
  double v = 0.0, T = 0.0;
  std::uint64_t checks = 0, violations = 0;
  double worst_ratio = 0.0, worst_x = 0.0;  // argmax of prob/bound over x
};

struct BoundSweepResult {
  std::uint64_t checks = 0;
  std::vector<BoundRow> rows;
  std::vector<BoundViolation> violations;
  double worst_ratio = 0.0;  // max prob/bound over all checks
  double mu_hat = 0.0;
  double c1 = 1.0;  // worst almost-decreasing constant across windows
  std::string detail;
};

// Exhaustive check of the bound against a discretized severity: exact n-fold
// convolution window probabilities versus the bound, for every n <= n_max,
// every lattice x in [x_lo, x_hi], every v, and every window.
BoundSweepResult bound_sweep(const SeverityModel& severity, const BoundSweepSettings& s);

}  // namespace ldlab
