#include "ldlab/severity.hpp"

#include "ldlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ldlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double pareto_tail(const Pareto& p, double x) {
  return x < p.xm ? 1.0 : std::pow(p.xm / x, p.alpha);
}

double step_tail(const StepPareto& s, double x) {
  if (x < 1.0) return 1.0;
  return std::exp2(-s.alpha * std::floor(std::log2(x)));
}
}  // namespace

SeverityModel::SeverityModel(Pareto p) : family_(p) {
  if (!(p.alpha > 0.0) || !(p.xm > 0.0))
    throw std::invalid_argument("Pareto: alpha and xm must be > 0");
}

SeverityModel::SeverityModel(StepPareto s) : family_(s) {
  if (!(s.alpha > 0.0)) throw std::invalid_argument("StepPareto: alpha must be > 0");
}

SeverityModel::SeverityModel(LatticePmf pmf) : family_(std::move(pmf)) {
  const auto& m = std::get<LatticePmf>(family_);
  m.validate();
  tail_view_.emplace(m);
}

SeverityModel SeverityModel::shifted(double c, SeverityModel inner) {
  SeverityModel out;
  out.family_ = ShiftedBy{c, std::make_shared<const SeverityModel>(std::move(inner))};
  return out;
}

double SeverityModel::tail(double x) const {
  return std::visit(
      [&](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Pareto>) return pareto_tail(fam, x);
        else if constexpr (std::is_same_v<T, StepPareto>) return step_tail(fam, x);
        else if constexpr (std::is_same_v<T, LatticePmf>) return tail_view_->tail(x);
        else return fam.inner->tail(x - fam.c);
      },
      family_);
}

double SeverityModel::interval(double x, Window w) const {
  if (w.infinite()) return tail(x);
  return tail(x) - tail(x + w.T);
}

double SeverityModel::mean() const {
  return std::visit(
      [&](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Pareto>) {
          return fam.alpha > 1.0 ? fam.alpha * fam.xm / (fam.alpha - 1.0) : kInf;
        } else if constexpr (std::is_same_v<T, StepPareto>) {
          // atoms 2^n with mass 2^(-alpha n)(2^alpha - 1), n >= 1
          if (fam.alpha <= 1.0) return kInf;
          const double r = std::exp2(1.0 - fam.alpha);
          return (std::exp2(fam.alpha) - 1.0) * r / (1.0 - r);
        } else if constexpr (std::is_same_v<T, LatticePmf>) {
          return fam.mean();
        } else {
          return fam.inner->mean() + fam.c;
        }
      },
      family_);
}

double SeverityModel::plus_moment(double r) const {
  if (!(r > 1.0)) throw std::invalid_argument("plus_moment: requires r > 1");
  return std::visit(
      [&](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Pareto>) {
          return r < fam.alpha ? fam.alpha * std::pow(fam.xm, r) / (fam.alpha - r) : kInf;
        } else if constexpr (std::is_same_v<T, StepPareto>) {
          if (r >= fam.alpha) return kInf;
          const double q = std::exp2(r - fam.alpha);
          return (std::exp2(fam.alpha) - 1.0) * q / (1.0 - q);
        } else if constexpr (std::is_same_v<T, LatticePmf>) {
          double s = 0.0;
          for (std::size_t k = 1; k < fam.masses.size(); ++k)
            s += std::pow(static_cast<double>(k) * fam.h, r) * fam.masses[k];
          return s;
        } else {
          if (const LatticePmf* lp = fam.inner->lattice()) {
            double s = 0.0;
            for (std::size_t k = 0; k < lp->masses.size(); ++k) {
              const double z = static_cast<double>(k) * lp->h + fam.c;
              if (z > 0.0) s += std::pow(z, r) * lp->masses[k];
            }
            return s;
          }
          // E((X+c)^+)^r = int_0^inf r z^(r-1) P(X+c > z) dz, evaluated by
          // composite Simpson over geometric segments with a power-law tail
          // remainder; divergence detected from the measured tail slope.
          const auto tail_s = [&](double z) { return fam.inner->tail(z - fam.c); };
          const double z_hi = 1e9;
          const double t1 = tail_s(z_hi), t2 = tail_s(2.0 * z_hi);
          if (t1 > 0.0 && t2 > 0.0) {
            const double slope = std::log2(t2 / t1);  // local tail exponent (negative)
            if (r + slope >= -0.05) return kInf;      // integrand ~ z^(r-1+slope) not integrable
          }
          double total = 0.0, lo = 0.0;
          for (double hi = 1.0 / 64.0; lo < z_hi; hi = std::min(hi * 2.0, z_hi)) {
            const int n = 64;  // Simpson panels per segment
            const double step = (hi - lo) / (2 * n);
            double acc = 0.0;
            for (int i = 0; i <= 2 * n; ++i) {
              const double z = lo + step * i;
              const double f = (z <= 0.0 ? 0.0 : r * std::pow(z, r - 1.0) * tail_s(z));
              acc += f * ((i == 0 || i == 2 * n) ? 1.0 : (i % 2 ? 4.0 : 2.0));
            }
            total += acc * step / 3.0;
            lo = hi;
          }
          if (t1 > 0.0 && t2 > 0.0) {
            const double slope = std::log2(t2 / t1);
            total += -r * std::pow(z_hi, r) * t1 / (r + slope);  // int_zhi r z^{r-1} t1 (z/zhi)^slope dz
          }
          return total;
        }
      },
      family_);
}

double SeverityModel::sample(std::mt19937_64& eng) const {
  return std::visit(
      [&](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Pareto>) {
          const double u = 1.0 - uniform01(eng);  // in (0, 1]
          return fam.xm * std::pow(u, -1.0 / fam.alpha);
        } else if constexpr (std::is_same_v<T, StepPareto>) {
          const double u = 1.0 - uniform01(eng);
          // X = 2^n iff u in (2^(-alpha n), 2^(-alpha(n-1))]
          const auto n = std::max<std::int64_t>(
              1, static_cast<std::int64_t>(std::ceil(-std::log2(u) / fam.alpha)));
          return std::exp2(static_cast<double>(n));
        } else if constexpr (std::is_same_v<T, LatticePmf>) {
          // inverse-CDF on the suffix view: X = k*h with suffix[k+1] < u' <= suffix[k]
          const double u = 1.0 - uniform01(eng);
          const auto& suf = tail_view_->suffix;
          // X = kh iff u in (suf[k+1], suf[k]]; suf is nonincreasing.
          auto it = std::upper_bound(suf.begin(), suf.end(), u, std::greater<double>());
          std::size_t k = static_cast<std::size_t>(it - suf.begin());
          return static_cast<double>(k > 0 ? k - 1 : 0) * fam.h;
        } else {
          return fam.inner->sample(eng) + fam.c;
        }
      },
      family_);
}

// Probe just below 0; the margin keeps lattice-origin atoms counted as mass at 0.
bool SeverityModel::nonnegative() const { return tail(-1e-6) >= 1.0 - 1e-15; }

std::string SeverityModel::describe() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Pareto>) os << "pareto(alpha=" << fam.alpha << ",xm=" << fam.xm << ")";
        else if constexpr (std::is_same_v<T, StepPareto>) os << "step_pareto(alpha=" << fam.alpha << ")";
        else if constexpr (std::is_same_v<T, LatticePmf>)
          os << "lattice(h=" << fam.h << ",cells=" << fam.masses.size() << ")";
        else os << "shifted(c=" << fam.c << "," << fam.inner->describe() << ")";
      },
      family_);
  return os.str();
}

const LatticePmf* SeverityModel::lattice() const { return std::get_if<LatticePmf>(&family_); }

LatticePmf SeverityModel::discretize(double h, std::size_t K, Rounding r, DiscretizeReport* rep) const {
  if (!(h > 0.0) || K == 0) throw std::invalid_argument("discretize: need h > 0 and K >= 1");
  if (tail(-h / 2.0) < 1.0 - 1e-15)
    throw std::invalid_argument("discretize: model has mass below the lattice origin");
  LatticePmf out;
  out.h = h;
  out.masses.assign(K + 1, 0.0);
  auto cell_tail = [&](double z) { return tail(z); };
  double residual = 0.0;
  switch (r) {
    case Rounding::up:  // m_k = P(X in ((k-1)h, kh]); ceil(X) >= X
      out.masses[0] = 1.0 - cell_tail(0.0);
      for (std::size_t k = 1; k <= K; ++k)
        out.masses[k] = cell_tail((static_cast<double>(k) - 1.0) * h) - cell_tail(static_cast<double>(k) * h);
      residual = cell_tail(static_cast<double>(K) * h);
      break;
    case Rounding::down:  // m_k = P(X in (kh, (k+1)h]); floor(X) <= X
      out.masses[0] = 1.0 - cell_tail(h);
      for (std::size_t k = 1; k <= K; ++k)
        out.masses[k] = cell_tail(static_cast<double>(k) * h) - cell_tail((static_cast<double>(k) + 1.0) * h);
      residual = cell_tail((static_cast<double>(K) + 1.0) * h);
      break;
    case Rounding::midpoint:  // m_k = P(X in ((k-.5)h, (k+.5)h])
      out.masses[0] = 1.0 - cell_tail(0.5 * h);
      for (std::size_t k = 1; k <= K; ++k)
        out.masses[k] = cell_tail((static_cast<double>(k) - 0.5) * h) - cell_tail((static_cast<double>(k) + 0.5) * h);
      residual = cell_tail((static_cast<double>(K) + 0.5) * h);
      break;
  }
  out.masses[K] += residual;  // lumped, never dropped
  if (rep) {
    rep->residual_tail = residual;
    rep->dominance = (r == Rounding::up ? +1 : r == Rounding::down ? -1 : 0);
  }
  return out;
}

double SeverityModel::almost_decreasing_constant(Window w, double x0,
                                                 const std::vector<double>& probe_grid) const {
  if (probe_grid.empty()) throw std::invalid_argument("almost_decreasing_constant: empty probe grid");
  std::vector<double> pts;
  for (double x : probe_grid)
    if (x >= x0) pts.push_back(x);
  if (pts.empty()) throw std::invalid_argument("almost_decreasing_constant: no probe points >= x0");
  std::sort(pts.begin(), pts.end());
  // right-to-left pass: c = max over x of (sup_{u>=x} F(u+D)) / F(x+D)
  double running_sup = 0.0, c = 0.0;
  for (std::size_t i = pts.size(); i-- > 0;) {
    const double fx = interval(pts[i], w);
    if (fx <= 0.0)
      throw std::domain_error("almost_decreasing_constant: window beyond support at x=" +
                              std::to_string(pts[i]));
    running_sup = std::max(running_sup, fx);
    c = std::max(c, running_sup / fx);
  }
  return c;
}

}  // namespace ldlab
