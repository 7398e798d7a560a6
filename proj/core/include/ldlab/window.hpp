#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ldlab {

// Half-open observation window (x, x+T]; T may be infinite, which recovers
// the plain upper tail (x, inf).
struct Window {
  double T = std::numeric_limits<double>::infinity();

  static Window unbounded() { return Window{std::numeric_limits<double>::infinity()}; }
  static Window of(double T) {
    if (!(T > 0.0)) throw std::invalid_argument("Window: T must be > 0, got " + std::to_string(T));
    return Window{T};
  }

  bool infinite() const { return std::isinf(T); }

  // z in (x, x+T]; the atom at x is excluded, the atom at x+T included.
  bool contains(double x, double z) const {
    return z > x && (infinite() || z <= x + T);
  }
};

}  // namespace ldlab
