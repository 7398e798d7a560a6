#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ldlab/window.hpp"

namespace ldlab {

// Index of the lattice cell holding value z: largest k with k*h <= z, nudged so
// that values an ulp below a lattice point land ON it. Good for |z/h| <= ~1e7.
inline std::int64_t cell_at(double z, double h) {
  return static_cast<std::int64_t>(std::floor(z / h + 1e-9));
}

// Pmf supported on {0, h, 2h, ...}; index k <-> value k*h.
struct LatticePmf {
  double h = 1.0;
  std::vector<double> masses;

  double total() const { return std::accumulate(masses.begin(), masses.end(), 0.0); }
  double mean() const {
    double s = 0.0;
    for (std::size_t k = 0; k < masses.size(); ++k) s += static_cast<double>(k) * h * masses[k];
    return s;
  }
  double second_moment() const {
    double s = 0.0;
    for (std::size_t k = 0; k < masses.size(); ++k) {
      const double z = static_cast<double>(k) * h;
      s += z * z * masses[k];
    }
    return s;
  }
  double end() const { return static_cast<double>(masses.empty() ? 0 : masses.size() - 1) * h; }

  void validate() const {
    if (!(h > 0.0)) throw std::invalid_argument("LatticePmf: step h must be > 0");
    if (masses.empty()) throw std::invalid_argument("LatticePmf: empty mass vector");
    for (double m : masses)
      if (!(m >= 0.0)) throw std::invalid_argument("LatticePmf: negative mass");
    if (std::abs(total() - 1.0) > 1e-12)
      throw std::invalid_argument("LatticePmf: masses must sum to 1 within 1e-12");
  }
};

// Suffix-sum view for O(1) tail and window queries on a lattice pmf.
// suffix[k] = beyond + sum_{j >= k} masses[j]; suffix[size] = beyond. The
// `beyond` seed carries mass past the grid end (e.g. a truncated aggregate
// pmf's remainder) so unbounded tails stay exact; finite windows cancel it.
struct LatticeTail {
  double h;
  std::vector<double> suffix;

  explicit LatticeTail(const LatticePmf& pmf, double beyond = 0.0)
      : h(pmf.h), suffix(pmf.masses.size() + 1, beyond) {
    for (std::size_t k = pmf.masses.size(); k-- > 0;) suffix[k] = suffix[k + 1] + pmf.masses[k];
  }

  // P(X > z): atoms exactly at z are excluded (right-continuous survival).
  double tail(double z) const {
    std::int64_t k0 = cell_at(z, h) + 1;
    if (k0 < 0) k0 = 0;
    if (k0 >= static_cast<std::int64_t>(suffix.size())) return 0.0;
    return suffix[static_cast<std::size_t>(k0)];
  }

  // P(X in (x, x+T]).
  double window_mass(double x, Window w) const {
    if (w.infinite()) return tail(x);
    return tail(x) - tail(x + w.T);
  }
};

}  // namespace ldlab
