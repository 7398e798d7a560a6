#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace ldlab {

using TailFn = std::function<double(double)>;

// npts log-spaced points on [lo, hi], endpoints exact.
std::vector<double> log_grid(double lo, double hi, int npts);

// Probe grid augmented with near-dyadic bracket points 2^n (1 +- 1e-4) for
// n in [n_lo, n_hi]; brackets pin the extreme window ratios of step tails.
std::vector<double> with_dyadic_brackets(std::vector<double> grid, int n_lo, int n_hi);

inline std::vector<double> default_local_eps() { return {0.1, 0.03, 0.01, 0.003, 0.001}; }
inline std::vector<double> default_matus_y() { return {2.0, 4.0, 8.0, 16.0}; }
inline std::vector<double> default_potter_y() {
  return {1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 16.0, 32.0, 64.0, 128.0};
}

struct LocalIndices {
  double l = 1.0, L = 1.0;  // extremes at the smallest eps
  std::vector<double> eps_seq;
  std::vector<std::pair<double, double>> per_eps;  // (min, max) ratio per eps
};

// Two-sided local window-ratio extremes over the upper half of the probe grid:
// for each eps, the min and max of f(z)/f(x) over z in [x(1-eps), x(1+eps)]
// (probe points inside the bracket included). The smallest eps gives (l, L).
LocalIndices local_indices(const TailFn& f, const std::vector<double>& probes,
                           const std::vector<double>& eps_seq);

struct MatusIndices {
  double alpha = 0.0;  // slope of log sup_x f(xy)/f(x) vs log y (upper index)
  double beta = 0.0;   // slope of log inf_x f(xy)/f(x) vs log y (lower index)
};

// Least-squares slopes over the upper half of the y ladder; exact for pure
// power tails and for dyadic step tails on a dyadic upper ladder.
MatusIndices matuszewska_indices(const TailFn& f, const std::vector<double>& probes,
                                 const std::vector<double>& y_grid);

struct PotterViolation {
  double x = 0.0, y = 0.0, ratio = 0.0, bound = 0.0;
};

struct PotterCertificate {
  bool upper = true;
  double alpha = 0.0;
  bool feasible = false;
  double c = 0.0, x0 = 0.0;
  std::vector<PotterViolation> violations;  // samples for the weakest constant when infeasible
};

// Search (c, x0) on fixed ladders such that f(xy)/f(x) <= c*y^alpha for all
// probe x >= x0 and ladder y (upper; >= for lower with reciprocal constants).
// x0 candidates stay within the first 75% of the grid so a certificate that
// passes retains real coverage instead of degenerating to the last point.
PotterCertificate potter_search(const TailFn& f, double alpha, bool upper,
                                const std::vector<double>& probes,
                                const std::vector<double>& y_grid);

// Re-check a found certificate on an independent (usually denser) grid.
bool potter_verify(const TailFn& f, const PotterCertificate& cert,
                   const std::vector<double>& probes, const std::vector<double>& y_grid);

struct PowerDecayReport {
  bool pass = false;
  std::vector<double> decade_maxima;  // maxima of x^{-p}/f(x), one per decade
  std::string detail;
};

// Does x^{-p} decay strictly faster than f? h(x) = x^{-p}/f(x) must have
// nonincreasing per-decade maxima with the last at most a tenth of the first.
// Decade maxima (not pointwise values) keep step-tail sawtooth from false alarms.
PowerDecayReport power_decay_check(const TailFn& f, double p, double x_lo, double x_hi,
                                   int pts_per_decade = 48);

}  // namespace ldlab
