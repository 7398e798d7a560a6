#include "ldlab/variation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ldlab {

std::vector<double> log_grid(double lo, double hi, int npts) {
  if (!(lo > 0.0) || !(hi > lo) || npts < 2) throw std::invalid_argument("log_grid: bad range");
  const double la = std::log(lo), lb = std::log(hi);
  std::vector<double> out;
  out.reserve(npts);
  for (int i = 0; i < npts; ++i)
    out.push_back(i == npts - 1 ? hi : std::exp(la + (lb - la) * static_cast<double>(i) / (npts - 1)));
  return out;
}

std::vector<double> with_dyadic_brackets(std::vector<double> grid, int n_lo, int n_hi) {
  for (int n = n_lo; n <= n_hi; ++n) {
    const double p = std::exp2(n);
    grid.push_back(p * (1.0 - 1e-4));
    grid.push_back(p * (1.0 + 1e-4));
  }
  std::sort(grid.begin(), grid.end());
  return grid;
}

LocalIndices local_indices(const TailFn& f, const std::vector<double>& probes,
                           const std::vector<double>& eps_seq) {
  if (probes.size() < 4) throw std::invalid_argument("local_indices: probe grid too small");
  LocalIndices out;
  out.eps_seq = eps_seq;
  const std::size_t half = probes.size() / 2;
  for (double eps : eps_seq) {
    double lo = 1.0, hi = 1.0;
    for (std::size_t i = half; i < probes.size(); ++i) {
      const double x = probes[i];
      const double a = (1.0 - eps) * x, b = (1.0 + eps) * x;
      const double fx = f(x);
      if (!(fx > 0.0)) throw std::domain_error("local_indices: zero tail at probe point");
      const auto consider = [&](double z) {
        const double r = f(z) / fx;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      };
      consider(a);
      consider(b);
      const auto it_lo = std::lower_bound(probes.begin(), probes.end(), a);
      const auto it_hi = std::upper_bound(probes.begin(), probes.end(), b);
      for (auto it = it_lo; it != it_hi; ++it) consider(*it);
    }
    out.per_eps.emplace_back(lo, hi);
  }
  out.l = out.per_eps.back().first;
  out.L = out.per_eps.back().second;
  return out;
}

namespace {
double slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return num / den;
}
}  // namespace

MatusIndices matuszewska_indices(const TailFn& f, const std::vector<double>& probes,
                                 const std::vector<double>& y_grid) {
  if (y_grid.size() < 2) throw std::invalid_argument("matuszewska_indices: need >= 2 ladder points");
  std::vector<double> sup_r, inf_r;
  for (double y : y_grid) {
    double sup = 0.0, inf = std::numeric_limits<double>::infinity();
    for (double x : probes) {
      const double r = f(x * y) / f(x);
      sup = std::max(sup, r);
      inf = std::min(inf, r);
    }
    sup_r.push_back(sup);
    inf_r.push_back(inf);
  }
  const std::size_t k = y_grid.size() / 2;  // regression on the upper half
  std::vector<double> ly, ls, li;
  for (std::size_t i = k; i < y_grid.size(); ++i) {
    ly.push_back(std::log(y_grid[i]));
    ls.push_back(std::log(sup_r[i]));
    li.push_back(std::log(inf_r[i]));
  }
  return {slope(ly, ls), slope(ly, li)};
}

PotterCertificate potter_search(const TailFn& f, double alpha, bool upper,
                                const std::vector<double>& probes,
                                const std::vector<double>& y_grid) {
  PotterCertificate cert;
  cert.upper = upper;
  cert.alpha = alpha;
  std::vector<double> ladder = {1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0};
  if (!upper)
    for (double& c : ladder) c = 1.0 / c;
  const std::size_t x0_limit = probes.size() * 3 / 4;  // no vacuous tail-end certificates
  const auto holds_from = [&](double c, std::size_t ixa) {
    for (std::size_t i = ixa; i < probes.size(); ++i) {
      const double x = probes[i];
      const double fx = f(x);
      for (double y : y_grid) {
        const double r = f(x * y) / fx;
        const double bound = c * std::pow(y, alpha);
        if (upper ? r > bound * (1.0 + 1e-12) : r < bound * (1.0 - 1e-12)) return false;
      }
    }
    return true;
  };
  for (double c : ladder) {
    for (std::size_t ixa = 0; ixa < x0_limit; ++ixa) {
      if (holds_from(c, ixa)) {
        cert.feasible = true;
        cert.c = c;
        cert.x0 = probes[ixa];
        return cert;
      }
    }
  }
  // collect violation samples for the weakest constant, starting from x0 = first probe
  const double c_w = ladder.back();
  for (double x : probes) {
    const double fx = f(x);
    for (double y : y_grid) {
      const double r = f(x * y) / fx;
      const double bound = c_w * std::pow(y, alpha);
      const bool bad = upper ? r > bound * (1.0 + 1e-12) : r < bound * (1.0 - 1e-12);
      if (bad) {
        cert.violations.push_back({x, y, r, bound});
        if (cert.violations.size() >= 16) return cert;
      }
    }
  }
  return cert;
}

bool potter_verify(const TailFn& f, const PotterCertificate& cert,
                   const std::vector<double>& probes, const std::vector<double>& y_grid) {
  if (!cert.feasible) return false;
  for (double x : probes) {
    if (x < cert.x0 * (1.0 - 1e-12)) continue;
    const double fx = f(x);
    for (double y : y_grid) {
      const double r = f(x * y) / fx;
      const double bound = cert.c * std::pow(y, cert.alpha);
      if (cert.upper ? r > bound * (1.0 + 1e-12) : r < bound * (1.0 - 1e-12)) return false;
    }
  }
  return true;
}

PowerDecayReport power_decay_check(const TailFn& f, double p, double x_lo, double x_hi,
                                   int pts_per_decade) {
  if (!(x_lo > 0.0) || !(x_hi > 10.0 * x_lo))
    throw std::invalid_argument("power_decay_check: need at least one full decade");
  PowerDecayReport rep;
  const int decades = static_cast<int>(std::round(std::log10(x_hi / x_lo)));
  for (int d = 0; d < decades; ++d) {
    const double lo = x_lo * std::pow(10.0, d);
    double mx = 0.0;
    for (int i = 0; i < pts_per_decade; ++i) {
      const double x = lo * std::pow(10.0, static_cast<double>(i) / pts_per_decade);
      const double fx = f(x);
      if (!(fx > 0.0)) throw std::domain_error("power_decay_check: zero tail at probe point");
      mx = std::max(mx, std::pow(x, -p) / fx);
    }
    rep.decade_maxima.push_back(mx);
  }
  bool mono = true;
  for (std::size_t i = 0; i + 1 < rep.decade_maxima.size(); ++i)
    if (rep.decade_maxima[i + 1] > rep.decade_maxima[i] * (1.0 + 1e-9)) mono = false;
  const bool tenth = rep.decade_maxima.back() <= rep.decade_maxima.front() / 10.0;
  rep.pass = mono && tenth;
  std::ostringstream os;
  os << "decade maxima " << (mono ? "nonincreasing" : "NOT nonincreasing") << "; last "
     << (tenth ? "<=" : ">") << " first/10";
  rep.detail = os.str();
  return rep;
}

}  // namespace ldlab
