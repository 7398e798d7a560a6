#include "ldlab/compound.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ldlab {

CountSpec CountSpec::poisson(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("CountSpec::poisson: lambda must be > 0");
  CountSpec c;
  c.family = Family::poisson;
  c.lambda = lambda;
  c.a = 0.0;
  c.b = lambda;
  return c;
}

CountSpec CountSpec::negbin(double r, double beta) {
  if (!(r > 0.0) || !(beta > 0.0)) throw std::invalid_argument("CountSpec::negbin: need r > 0, beta > 0");
  CountSpec c;
  c.family = Family::negbin;
  c.r = r;
  c.beta = beta;
  const double q = beta / (1.0 + beta);
  c.a = q;
  c.b = (r - 1.0) * q;
  return c;
}

CountSpec CountSpec::binomial(int n, double q) {
  if (n < 1 || !(q > 0.0) || !(q < 1.0))
    throw std::invalid_argument("CountSpec::binomial: need n >= 1, 0 < q < 1");
  CountSpec c;
  c.family = Family::binomial;
  c.n = n;
  c.q = q;
  c.a = -q / (1.0 - q);
  c.b = (n + 1) * q / (1.0 - q);
  return c;
}

double CountSpec::mean() const {
  switch (family) {
    case Family::poisson: return lambda;
    case Family::negbin: return r * beta;
    case Family::binomial: return n * q;
  }
  return 0.0;
}

double CountSpec::pmf(std::int64_t k) const {
  if (k < 0) return 0.0;
  const double kd = static_cast<double>(k);
  switch (family) {
    case Family::poisson:
      return std::exp(kd * std::log(lambda) - lambda - std::lgamma(kd + 1.0));
    case Family::negbin: {
      const double qq = beta / (1.0 + beta);
      return std::exp(std::lgamma(r + kd) - std::lgamma(r) - std::lgamma(kd + 1.0) +
                      r * std::log1p(-qq) + kd * std::log(qq));
    }
    case Family::binomial: {
      if (k > n) return 0.0;
      const double nd = static_cast<double>(n);
      return std::exp(std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
                      kd * std::log(q) + (nd - kd) * std::log1p(-q));
    }
  }
  return 0.0;
}

double CountSpec::mass_at_zero(double f0) const {
  switch (family) {
    case Family::poisson: return std::exp(-lambda * (1.0 - f0));
    case Family::negbin: {
      const double qq = beta / (1.0 + beta);
      return std::pow((1.0 - qq) / (1.0 - qq * f0), r);
    }
    case Family::binomial: return std::pow(1.0 - q + q * f0, n);
  }
  return 0.0;
}

std::string CountSpec::describe() const {
  std::ostringstream os;
  switch (family) {
    case Family::poisson: os << "poisson(lambda=" << lambda << ")"; break;
    case Family::negbin: os << "negbin(r=" << r << ",beta=" << beta << ")"; break;
    case Family::binomial: os << "binomial(n=" << n << ",q=" << q << ")"; break;
  }
  return os.str();
}

LatticePmf panjer_pmf(const CountSpec& count, const LatticePmf& severity, std::size_t K) {
  severity.validate();
  const auto& f = severity.masses;
  const std::size_t M = f.size() - 1;
  const double f0 = f[0];
  const double denom = 1.0 - count.a * f0;  // > 0 for all (a,b,0) families
  LatticePmf out;
  out.h = severity.h;
  out.masses.assign(K + 1, 0.0);
  auto& g = out.masses;
  g[0] = count.mass_at_zero(f0);
  for (std::size_t k = 1; k <= K; ++k) {
    const double bk = count.b / static_cast<double>(k);
    const std::size_t jmax = std::min(k, M);
    double s = 0.0, comp = 0.0;  // Kahan
    for (std::size_t j = 1; j <= jmax; ++j) {
      const double term = (count.a + bk * static_cast<double>(j)) * f[j] * g[k - j];
      const double y = term - comp;
      const double t = s + y;
      comp = (t - s) - y;
      s = t;
    }
    g[k] = s / denom;
  }
  return out;
}

LatticePmf convolution_pmf(const CountSpec& count, const LatticePmf& severity, std::size_t K,
                           double tail_eps) {
  severity.validate();
  const auto& f = severity.masses;
  const std::size_t M = std::min(f.size() - 1, K);
  std::vector<double> cur(K + 1, 0.0), next(K + 1, 0.0);
  cur[0] = 1.0;  // zero-fold convolution
  LatticePmf out;
  out.h = severity.h;
  out.masses.assign(K + 1, 0.0);
  double cum = 0.0;
  for (std::int64_t n = 0;; ++n) {
    const double pn = count.pmf(n);
    cum += pn;
    if (pn > 0.0)
      for (std::size_t k = 0; k <= K; ++k) out.masses[k] += pn * cur[k];
    if (1.0 - cum < tail_eps) break;
    if (n > 200000) throw std::runtime_error("convolution_pmf: count tail did not close");
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t k = 0; k <= K; ++k) {
      if (cur[k] == 0.0) continue;
      const std::size_t jm = std::min(M, K - k);
      for (std::size_t j = 0; j <= jm; ++j) next[k + j] += cur[k] * f[j];
    }
    cur.swap(next);
  }
  return out;
}

LatticePmf nfold_pmf(const LatticePmf& severity, std::int64_t n, std::size_t K) {
  severity.validate();
  if (n < 1) throw std::invalid_argument("nfold_pmf: n must be >= 1");
  const auto& f = severity.masses;
  const std::size_t M = std::min(f.size() - 1, K);
  std::vector<double> cur(K + 1, 0.0), next(K + 1, 0.0);
  cur[0] = 1.0;
  for (std::int64_t i = 0; i < n; ++i) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t k = 0; k <= K; ++k) {
      if (cur[k] == 0.0) continue;
      const std::size_t jm = std::min(M, K - k);
      for (std::size_t j = 0; j <= jm; ++j) next[k + j] += cur[k] * f[j];
    }
    cur.swap(next);
  }
  LatticePmf out;
  out.h = severity.h;
  out.masses = std::move(cur);
  return out;
}

LatticeTail aggregate_tail(const LatticePmf& agg) {
  return LatticeTail(agg, std::max(0.0, 1.0 - agg.total()));
}

}  // namespace ldlab
