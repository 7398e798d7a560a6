#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ldlab/counting.hpp"
#include "ldlab/lattice.hpp"
#include "ldlab/rng.hpp"
#include "ldlab/severity.hpp"
#include "ldlab/window.hpp"

namespace ldlab {

// Vose alias table for O(1) draws over lattice cells. Construction walks the
// cells in a fixed order, so the table (and every stream drawn through it) is
// fully reproducible.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& masses);

  std::size_t draw(std::mt19937_64& eng) const {
    const double u = uniform01(eng) * static_cast<double>(prob_.size());
    std::size_t i = static_cast<std::size_t>(u);
    if (i >= prob_.size()) i = prob_.size() - 1;
    return (u - static_cast<double>(i)) < prob_[i] ? i : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

// Inverse-CDF Poisson draw from a precomputed cumulative table (mean <= ~700).
class PoissonTable {
 public:
  explicit PoissonTable(double mean);

  std::int64_t draw(std::mt19937_64& eng) const {
    const double u = uniform01(eng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return static_cast<std::int64_t>(cdf_.size()) - 1;
    return static_cast<std::int64_t>(it - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;  // cdf_[n] = P(N <= n)
};

// Counts aggregate-lattice values in cells (lo, hi]; hi = INT64_MAX when unbounded.
struct CellWindow {
  std::int64_t lo = 0;
  std::int64_t hi = INT64_MAX;
};

struct McTally {
  std::vector<std::uint64_t> hits;  // one count per window
  std::uint64_t samples = 0;
};

// Deterministic MC for the aggregate S = sum_{i<=N}(X_i + shift) - Y on the
// severity lattice: N ~ Poisson(count_mean) on the count stream (or the fixed
// integer count_mean when count_is_fixed), X_i cells from `severity` on the
// severity stream, and optional Y cells drawn from `premium` on the premium
// stream. Work proceeds in 65536-sample chunks, each with its own engines
// seeded from (root_seed, stream tag, chunk index); chunk tallies are exact
// integer sums, so any worker layout produces identical totals.
McTally mc_window_hits(const LatticePmf& severity, double count_mean, std::int64_t shift_cells,
                       const LatticePmf* premium, const std::vector<CellWindow>& windows,
                       std::uint64_t samples, std::uint64_t root_seed, bool count_is_fixed = false);

// Same tally restricted to chunk indices [chunk_begin, chunk_end); shards
// combine by plain addition of hits and samples.
McTally mc_window_hits_chunks(const LatticePmf& severity, double count_mean, std::int64_t shift_cells,
                              const LatticePmf* premium, const std::vector<CellWindow>& windows,
                              std::uint64_t samples, std::uint64_t root_seed,
                              std::uint64_t chunk_begin, std::uint64_t chunk_end,
                              bool count_is_fixed = false);

inline constexpr std::uint64_t kMcChunk = 65536;

// Premium income Y(t): a deterministic linear drift or an independent compound
// Poisson with lattice increments. b(t) = E Y(t) is analytic in both cases.
struct PremiumProcess {
  enum class Family { deterministic_linear, compound_poisson };
  Family family = Family::deterministic_linear;
  double rate = 0.0;     // linear: Y(t) = rate*t; compound: jump intensity
  LatticePmf increment;  // compound jump-size pmf

  static PremiumProcess deterministic_linear(double rate);
  static PremiumProcess compound_poisson(double rate, LatticePmf increment);

  double b(double t) const;  // E Y(t)
  double sample(double t, std::mt19937_64& eng) const;
  std::string describe() const;
};

// Per-component engines for path draws, split from one root seed so the count,
// severity, and premium streams never overlap. Copying a PathStreams replays
// the exact same paths (same-stream identity tests rely on this).
struct PathStreams {
  std::mt19937_64 count, severity, premium;
};
PathStreams make_path_streams(std::uint64_t root_seed, std::uint64_t chunk = 0);

// One path of S_{N(t)} = sum_{k<=N(t)} X_k; the empty sum is 0.
double simulate_random_sum(const SeverityModel& severity, const CountingModel& counting, double t,
                           PathStreams& s);

// One path of sum_{k<=N(t)} (X_k + c) = S_{N(t)} + c*N(t), drawn jointly so
// that subtracting c*N recovers simulate_random_sum on the same stream exactly.
double simulate_shifted_sum(const SeverityModel& severity, double c, const CountingModel& counting,
                            double t, PathStreams& s);

// One path of the claim surplus S(t) = sum_{i<=N(t)} X_i - Y(t).
double simulate_claim_surplus(const SeverityModel& severity, const CountingModel& counting,
                              const PremiumProcess& premium, double t, PathStreams& s);

struct EstimateWithError {
  double estimate = 0.0;
  double se = 0.0;  // sqrt(p(1-p)/n)
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
};

// Monte Carlo frequency of {S_{N(t)} - mu*lambda(t) in (x, x+T]} with binomial
// stderr; mu is the analytic severity mean (must be finite). Chunked streams
// as above, so the estimate is reproducible for any worker layout.
EstimateWithError estimate_centered_interval(const SeverityModel& severity,
                                             const CountingModel& counting, double t, double x,
                                             Window w, std::uint64_t n_samples, std::uint64_t seed);

// Law-of-large-numbers check for the premium: values are P(|Y(t)/b(t)-1| > eps)
// per grid t — identically zero for deterministic premiums, exact compound
// lattice tails otherwise. Pass iff the trace is zero or decays (nonincreasing
// over the top half, last <= first/10).
ConditionReport check_premium_lln(const PremiumProcess& premium, const std::vector<double>& t_grid,
                                  double eps);

// nu-hat = max of b(t)/lambda(t) over the top half of the t grid.
double nu_estimate(const PremiumProcess& premium, const CountingModel& counting,
                   const std::vector<double>& t_grid);

}  // namespace ldlab
