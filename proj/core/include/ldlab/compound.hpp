#pragma once

#include <cstdint>
#include <string>

#include "ldlab/lattice.hpp"

namespace ldlab {

// Claim-count family usable by the (a,b,0) recursion: pmf ratio
// P(N=k)/P(N=k-1) = a + b/k for k >= 1.
struct CountSpec {
  enum class Family { poisson, negbin, binomial };
  Family family = Family::poisson;
  double a = 0.0, b = 0.0;  // recursion coefficients

  double lambda = 0.0;         // poisson mean
  double r = 0.0, beta = 0.0;  // negbin shape/scale, mean r*beta
  int n = 0;                   // binomial trials
  double q = 0.0;              // binomial success probability

  static CountSpec poisson(double lambda);
  static CountSpec negbin(double r, double beta);
  static CountSpec binomial(int n, double q);

  double mean() const;
  double pmf(std::int64_t k) const;       // direct log-gamma evaluation (oracle-grade)
  double mass_at_zero(double f0) const;   // P(S=0) seed given the severity atom at 0
  std::string describe() const;
};

// Aggregate-sum pmf on the severity lattice via the (a,b,0) recursion, cells
// 0..K with Kahan-compensated inner sums. Mass beyond cell K is simply not
// represented; pair with aggregate_tail() for windows that reach past the grid.
LatticePmf panjer_pmf(const CountSpec& count, const LatticePmf& severity, std::size_t K);

// Independent cross-check: mixture of n-fold convolutions sum_n P(N=n) f^{*n},
// stopping once the count tail past n drops below tail_eps.
LatticePmf convolution_pmf(const CountSpec& count, const LatticePmf& severity, std::size_t K,
                           double tail_eps = 1e-14);

// n-fold convolution f^{*n} truncated to cells 0..K.
LatticePmf nfold_pmf(const LatticePmf& severity, std::int64_t n, std::size_t K);

// Tail view of a (possibly truncated) aggregate pmf with the off-grid
// remainder 1 - total folded into every suffix entry: unbounded windows see
// the full residual mass, finite windows cancel it exactly.
LatticeTail aggregate_tail(const LatticePmf& agg);

}  // namespace ldlab
