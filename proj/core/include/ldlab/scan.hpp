#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ldlab/compound.hpp"
#include "ldlab/severity.hpp"
#include "ldlab/window.hpp"

namespace ldlab {

enum class ScanKind { fixed_count, random_sum, shifted_sum, surplus };
enum class ScanMode { exact, mc };

std::string to_string(ScanKind k);
std::string to_string(ScanMode m);

// One ratio-scan experiment: for each scale (claim count n, or Poisson mean
// lambda) and each grid point x, compare the aggregate window probability
// against its predicted first-order form:
//   fixed_count   P(S_n  in x + gamma*mu*n      + Delta) vs n      * F(x + gamma*mu + Delta)
//   random_sum    P(S    in x + gamma*mu*lam    + Delta) vs lambda * F(x + gamma*mu + Delta)
//   shifted_sum   P(S^c  in x + gamma*mu*lam    + Delta) vs lambda * F(x - c*lam + gamma*mu + Delta)
//   surplus       P(S - Y > x + gamma*mu*lam - b [ + Delta]) vs lambda * F(x + gamma*mu + Delta)
// where mu is the discretized severity mean, S^c sums shifted claims X_i + c,
// and Y is an independent compound-Poisson premium with E Y = b.
struct ScanSettings {
  ScanKind kind = ScanKind::random_sum;
  ScanMode mode = ScanMode::exact;
  Window window = Window::unbounded();
  double gamma = 1.0;

  // severity discretization
  double h = 0.125;
  double grid_end = 4096.0;  // severity lattice spans [0, grid_end]
  Rounding rounding = Rounding::midpoint;

  // per-scale x-grid: log-spaced on [scale, x_factor*scale], snapped to the lattice
  double x_factor = 10.0;
  int x_points = 25;

  // claim-count scales (lambda values, or integer n values for fixed_count),
  // ascending; trend and band verdicts read them in this order
  std::vector<double> scales;

  double shift = 0.0;  // shifted_sum: per-claim translation c (lattice multiple)

  // surplus: premium Y ~ compound Poisson with jumps of size premium_jump and
  // total mean premium_total = b; requires gamma > nu = b/lambda
  double premium_total = 0.0;
  double premium_jump = 1.0;

  // mc mode
  std::uint64_t mc_samples = 1'000'000;
  std::uint64_t seed = 20260819;

  // certification band [l^p*(1-slack), L^p*(1+slack)] checked on the last scale;
  // l_index = L_index = 0 skips the band verdict
  double l_index = 0.0, L_index = 0.0;
  int band_power = 2;
  double band_slack = 0.25;

  double trend_slack = 0.05;  // max|ratio-1| may grow by at most this factor per scale step
};

struct ScanRow {
  double scale = 0.0;  // n or lambda ("t" column in reports)
  double gamma = 1.0;
  double x = 0.0;
  double T = 0.0;  // +inf for the unbounded window
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio = 0.0;
  std::string provenance;  // "exact_panjer" | "exact_convolution" | "mc"
  double se = 0.0;         // std. error of the ratio (mc rows)
  bool low_precision = false;
};

struct ScanSeries {
  double scale = 0.0;
  std::vector<ScanRow> rows;
  // aggregates over rows with adequate precision
  double inf_ratio = 0.0, sup_ratio = 0.0, max_abs_dev = 0.0;
  std::size_t used_rows = 0;
};

struct ScanOutcome {
  ScanKind kind = ScanKind::random_sum;
  ScanMode mode = ScanMode::exact;
  std::vector<ScanSeries> series;
  double mu_hat = 0.0;  // discretized severity mean used for centering
  bool trend_pass = false;
  bool band_checked = false;
  double band_lo = 0.0, band_hi = 0.0;
  bool band_pass = false;
  bool pass = false;
  std::vector<std::string> warnings;
  std::string detail;
};

// Lattice x-grid: x_points log-spaced values on [base, factor*base] snapped to
// multiples of h, deduplicated.
std::vector<double> scan_x_grid(double base, double factor, int npts, double h);

ScanOutcome run_scan(const SeverityModel& severity, const ScanSettings& s);

}  // namespace ldlab
