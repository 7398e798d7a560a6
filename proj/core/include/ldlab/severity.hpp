#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "ldlab/lattice.hpp"
#include "ldlab/window.hpp"

namespace ldlab {

// Pareto tail (xm/x)^alpha for x >= xm.
struct Pareto {
  double alpha;
  double xm;
};

// Dyadic step tail 2^(-alpha*floor(log2 x)) for x >= 1: purely atomic at powers
// of two. The canonical alpha=1 member oscillates between its local bounds
// forever, so its window map is O-regular but NOT intermediate-regular.
struct StepPareto {
  double alpha = 1.0;
};

class SeverityModel;

// X + c for a fixed real shift c (summand translation).
struct ShiftedBy {
  double c;
  std::shared_ptr<const SeverityModel> inner;
};

enum class Rounding { up, down, midpoint };

struct DiscretizeReport {
  double residual_tail = 0.0;  // mass found beyond the grid end, lumped into the last cell
  int dominance = 0;           // +1: discretized variable >= original; -1: <=; 0: neither (midpoint)
};

// Claim-size distribution: analytic families, explicit lattice pmfs, and
// shifted wrappers, with one polymorphic value interface.
class SeverityModel {
 public:
  SeverityModel(Pareto p);
  SeverityModel(StepPareto s);
  SeverityModel(LatticePmf pmf);  // validates: masses >= 0, sum 1 within 1e-12
  static SeverityModel shifted(double c, SeverityModel inner);

  // P(X > x), right-continuous, total on all reals.
  double tail(double x) const;
  // P(X in (x, x+T]) = tail(x) - tail(x+T); tail(x) for the unbounded window.
  double interval(double x, Window w) const;
  // E X; +inf when divergent (StepPareto alpha <= 1).
  double mean() const;
  // E (X^+)^r for r > 1; +inf when divergent (Pareto r >= alpha).
  double plus_moment(double r) const;
  double sample(std::mt19937_64& eng) const;
  bool nonnegative() const;
  std::string describe() const;

  const LatticePmf* lattice() const;  // non-null iff this is a LatticePmf model

  // Project onto {0, h, ..., K*h}. up: X -> ceil(X/h)*h, down: floor, midpoint:
  // nearest. Residual mass beyond K*h is lumped into the last cell and reported,
  // never dropped. Errors if the model has mass below the lattice origin.
  LatticePmf discretize(double h, std::size_t K, Rounding r, DiscretizeReport* rep = nullptr) const;

  // c1 for the partial-sum window bound: an upper estimate of
  //   sup_{x in grid, x >= x0} sup_{u >= x, u in grid} F(u+Delta)/F(x+Delta).
  // Exactly 1 for families whose window map is nonincreasing. Errors on a zero
  // denominator (window beyond support).
  double almost_decreasing_constant(Window w, double x0, const std::vector<double>& probe_grid) const;

 private:
  SeverityModel() : family_(StepPareto{1.0}) {}
  std::variant<Pareto, StepPareto, LatticePmf, ShiftedBy> family_;
  std::optional<LatticeTail> tail_view_;  // cached suffix sums for lattice models
};

}  // namespace ldlab
