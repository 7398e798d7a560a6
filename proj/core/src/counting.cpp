#include "ldlab/counting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ldlab/rng.hpp"

namespace ldlab {

namespace {
constexpr std::uint64_t kTermCap = 1'000'000;
constexpr double kRelStop = 1e-16;

double log_pois_pmf(double m, std::int64_t n) {
  return static_cast<double>(n) * std::log(m) - m - std::lgamma(static_cast<double>(n) + 1.0);
}

double weight_pow(std::int64_t n, double p) {
  if (p == 0.0) return 1.0;
  if (p == 1.0) return static_cast<double>(n);
  if (p == 2.0) return static_cast<double>(n) * static_cast<double>(n);
  return std::pow(static_cast<double>(n), p);
}

// sum_{n > a} n^p Poisson(m)-pmf(n). Seeded at max(first term, mode) so a far
// left flank cannot underflow the whole sum; a downward pass then covers
// [first, mode) until terms vanish. Terms are charged to *budget_used; hitting
// kTermCap clears *converged and returns the partial sum.
double series_upper(double m, double a, double p, std::uint64_t* budget_used, bool* converged) {
  if (m <= 0.0) return 0.0;
  const std::int64_t n0 = static_cast<std::int64_t>(std::floor(a + 1e-9)) + 1;
  const std::int64_t split = std::max<std::int64_t>(n0, static_cast<std::int64_t>(m));
  double s = 0.0;
  double pm = std::exp(log_pois_pmf(m, split));
  for (std::int64_t n = split;; ++n) {
    const double term = weight_pow(n, p) * pm;
    s += term;
    if (++*budget_used >= kTermCap) {
      *converged = false;
      return s;
    }
    if (n > split + 4 && static_cast<double>(n) > m && term <= kRelStop * s) break;
    pm *= m / static_cast<double>(n + 1);
  }
  if (n0 < split) {
    double pmd = std::exp(log_pois_pmf(m, split - 1));
    for (std::int64_t n = split - 1; n >= n0; --n) {
      const double term = weight_pow(n, p) * pmd;
      s += term;
      if (++*budget_used >= kTermCap) {
        *converged = false;
        return s;
      }
      if (term <= kRelStop * s) break;
      pmd *= static_cast<double>(n) / m;  // pmf(n-1)
    }
  }
  return s;
}

// sum_{0 <= n <= b} n^p Poisson(m)-pmf(n), seeded at min(floor(b), mode).
double series_lower(double m, double b, double p) {
  const std::int64_t nb = static_cast<std::int64_t>(std::floor(b + 1e-9));
  if (nb < 0) return 0.0;
  if (m <= 0.0) return p == 0.0 ? 1.0 : 0.0;
  const std::int64_t mid = std::min<std::int64_t>(nb, static_cast<std::int64_t>(m));
  double s = 0.0;
  double pm = std::exp(log_pois_pmf(m, mid));
  for (std::int64_t n = mid; n >= 0; --n) {
    const double term = (p == 0.0 ? pm : weight_pow(n, p) * pm);
    s += term;
    if (term <= kRelStop * s) break;  // also exits on an underflowed seed
    if (n > 0) pm *= static_cast<double>(n) / m;  // pmf(n-1)
  }
  if (mid < nb) {
    double pmu = std::exp(log_pois_pmf(m, mid + 1));
    for (std::int64_t n = mid + 1; n <= nb; ++n) {
      const double term = weight_pow(n, p) * pmu;
      s += term;
      if (static_cast<double>(n) > m && term <= kRelStop * s) break;
      pmu *= m / static_cast<double>(n + 1);
    }
  }
  return s;
}

// Exact Poisson draw as a product of <=500-mean blocks (Knuth's method per block).
std::int64_t poisson_draw(double m, std::mt19937_64& eng) {
  std::int64_t total = 0;
  while (m > 0.0) {
    const double block = std::min(m, 500.0);
    const double limit = std::exp(-block);
    double prod = 1.0;
    std::int64_t k = -1;
    do {
      prod *= 1.0 - uniform01(eng);  // in (0,1]
      ++k;
    } while (prod > limit);
    total += k;
    m -= block;
  }
  return total;
}
}  // namespace

CountingModel::CountingModel(HomPoisson m) : family_(m) {
  if (!(m.rate > 0.0)) throw std::invalid_argument("HomPoisson: rate must be > 0");
}

CountingModel::CountingModel(MixedPoisson m) : family_(std::move(m)) {
  const auto& mp = std::get<MixedPoisson>(family_);
  if (!(mp.rate > 0.0)) throw std::invalid_argument("MixedPoisson: rate must be > 0");
  if (mp.theta.empty() || mp.theta.size() != mp.weight.size())
    throw std::invalid_argument("MixedPoisson: theta/weight size mismatch");
  double wsum = 0.0, mean = 0.0;
  for (std::size_t j = 0; j < mp.theta.size(); ++j) {
    if (!(mp.theta[j] > 0.0) || !(mp.weight[j] >= 0.0))
      throw std::invalid_argument("MixedPoisson: need theta > 0 and weight >= 0");
    wsum += mp.weight[j];
    mean += mp.weight[j] * mp.theta[j];
  }
  if (std::abs(wsum - 1.0) > 1e-9 || std::abs(mean - 1.0) > 1e-9)
    throw std::invalid_argument("MixedPoisson: mixing pmf must sum to 1 with mean(Theta) = 1");
}

CountingModel::CountingModel(DeterministicCount m) : family_(m) {
  if (!(m.rate > 0.0)) throw std::invalid_argument("DeterministicCount: rate must be > 0");
}

double CountingModel::lambda(double t) const {
  return std::visit([&](const auto& fam) { return fam.rate * t; }, family_);
}

bool CountingModel::deterministic() const {
  return std::holds_alternative<DeterministicCount>(family_);
}

const HomPoisson* CountingModel::hom_poisson() const { return std::get_if<HomPoisson>(&family_); }

std::vector<std::pair<double, double>> CountingModel::components(double t) const {
  if (const auto* hp = std::get_if<HomPoisson>(&family_)) return {{1.0, hp->rate * t}};
  if (const auto* mp = std::get_if<MixedPoisson>(&family_)) {
    std::vector<std::pair<double, double>> out;
    out.reserve(mp->theta.size());
    for (std::size_t j = 0; j < mp->theta.size(); ++j)
      out.emplace_back(mp->weight[j], mp->theta[j] * mp->rate * t);
    return out;
  }
  throw std::logic_error("components(): deterministic count is not a Poisson mixture");
}

std::int64_t CountingModel::sample(double t, std::mt19937_64& eng) const {
  return std::visit(
      [&](const auto& fam) -> std::int64_t {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, HomPoisson>) {
          return poisson_draw(fam.rate * t, eng);
        } else if constexpr (std::is_same_v<T, MixedPoisson>) {
          const double u = uniform01(eng);
          double acc = 0.0;
          std::size_t j = 0;
          for (; j + 1 < fam.weight.size(); ++j) {
            acc += fam.weight[j];
            if (u <= acc) break;
          }
          return poisson_draw(fam.theta[j] * fam.rate * t, eng);
        } else {
          return static_cast<std::int64_t>(std::floor(fam.rate * t));
        }
      },
      family_);
}

double CountingModel::truncated_p_moment(double t, double p, double delta, SeriesStatus* status) const {
  if (!(p >= 1.0)) throw std::invalid_argument("truncated_p_moment: requires p >= 1");
  if (!(delta > 0.0)) throw std::invalid_argument("truncated_p_moment: requires delta > 0");
  SeriesStatus local;
  SeriesStatus* st = status ? status : &local;
  st->converged = true;
  st->terms = 0;
  const double a = (1.0 + delta) * lambda(t);
  if (deterministic()) {
    const auto n = static_cast<std::int64_t>(std::floor(lambda(t)));
    return static_cast<double>(n) > a ? weight_pow(n, p) : 0.0;
  }
  double s = 0.0;
  for (const auto& [wj, mj] : components(t)) {
    s += wj * series_upper(mj, a, p, &st->terms, &st->converged);
    if (!st->converged) break;
  }
  return s;
}

double CountingModel::lower_tail(double t, double delta) const {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("lower_tail: requires 0 < delta < 1");
  const double b = (1.0 - delta) * lambda(t);
  if (deterministic())
    return static_cast<double>(static_cast<std::int64_t>(std::floor(lambda(t)))) <= b + 1e-9 ? 1.0 : 0.0;
  double s = 0.0;
  for (const auto& [wj, mj] : components(t)) s += wj * series_lower(mj, b, 0.0);
  return s;
}

std::string CountingModel::describe() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, HomPoisson>) os << "hom_poisson(rate=" << fam.rate << ")";
        else if constexpr (std::is_same_v<T, MixedPoisson>)
          os << "mixed_poisson(rate=" << fam.rate << ",components=" << fam.theta.size() << ")";
        else os << "deterministic(rate=" << fam.rate << ")";
      },
      family_);
  return os.str();
}

namespace {
bool nonincreasing_top_half(const std::vector<double>& v) {
  for (std::size_t i = v.size() / 2; i + 1 < v.size(); ++i)
    if (v[i + 1] > v[i] * (1.0 + 1e-9) + 1e-300) return false;
  return true;
}

bool decayed(const std::vector<double>& v) {
  if (v.empty()) return false;
  if (v.front() == 0.0) return v.back() == 0.0;
  return v.back() <= v.front() / 10.0;
}
}  // namespace

ConditionReport check_truncated_moment_growth(const CountingModel& model, double p, double delta,
                                              const std::vector<double>& t_grid) {
  ConditionReport rep;
  rep.condition = "truncated_moment_growth";
  rep.t_grid = t_grid;
  rep.p = p;
  rep.delta = delta;
  bool all_converged = true;
  std::uint64_t max_terms = 0;
  for (double t : t_grid) {
    SeriesStatus st;
    const double v = model.truncated_p_moment(t, p, delta, &st);
    rep.values.push_back(v / model.lambda(t));
    all_converged = all_converged && st.converged;
    max_terms = std::max(max_terms, st.terms);
  }
  const bool trend = nonincreasing_top_half(rep.values);
  rep.pass = all_converged && trend;
  std::ostringstream os;
  if (!all_converged)
    os << "series exceeded the 1e6-term cap (divergent p-moment signal)";
  else
    os << "normalized moment " << (trend ? "nonincreasing" : "NOT nonincreasing")
       << " over top half of t-grid; max series terms " << max_terms;
  rep.detail = os.str();
  return rep;
}

ConditionReport check_lower_tail_decay(const CountingModel& model, const SeverityModel& severity,
                                       Window w, double delta, const std::vector<double>& t_grid) {
  ConditionReport rep;
  rep.condition = "lower_tail_decay";
  rep.t_grid = t_grid;
  rep.delta = delta;
  for (double t : t_grid) {
    const double lam = model.lambda(t);
    const double denom = lam * severity.interval(lam, w);
    if (denom <= 0.0) throw std::domain_error("lower_tail_decay: zero severity window mass at lambda(t)");
    rep.values.push_back(model.lower_tail(t, delta) / denom);
  }
  const bool trend = nonincreasing_top_half(rep.values);
  const bool dec = decayed(rep.values);
  rep.pass = trend && dec;
  std::ostringstream os;
  os << "normalized lower tail " << (trend ? "nonincreasing" : "NOT nonincreasing")
     << " over top half; last " << (dec ? "<=" : ">") << " first/10";
  rep.detail = os.str();
  return rep;
}

ConditionReport check_count_concentration(const CountingModel& model, const std::vector<double>& t_grid,
                                          double eps, double delta) {
  ConditionReport rep;
  rep.condition = "count_concentration";
  rep.t_grid = t_grid;
  rep.eps = eps;
  rep.delta = delta;
  std::vector<double> off_mass, upper_mean, lower_mean;
  for (double t : t_grid) {
    const double lam = model.lambda(t);
    if (model.deterministic()) {
      const double xi = std::floor(lam) / lam;
      off_mass.push_back(std::abs(xi - 1.0) > eps ? 1.0 : 0.0);
      upper_mean.push_back(xi > 1.0 + eps ? xi : 0.0);
      lower_mean.push_back(xi <= 1.0 - delta ? xi : 0.0);
      continue;
    }
    double below = 0.0, above = 0.0, um = 0.0, lm = 0.0;
    for (const auto& [wj, mj] : model.components(t)) {
      std::uint64_t used = 0;
      bool conv = true;
      below += wj * series_lower(mj, (1.0 - eps) * lam - 2e-9, 0.0);  // strict N < (1-eps)L
      above += wj * series_upper(mj, (1.0 + eps) * lam, 0.0, &used, &conv);
      um += wj * series_upper(mj, (1.0 + eps) * lam, 1.0, &used, &conv) / lam;
      lm += wj * series_lower(mj, (1.0 - delta) * lam, 1.0) / lam;
    }
    off_mass.push_back(below + above);
    upper_mean.push_back(um);
    lower_mean.push_back(lm);
  }
  rep.values = off_mass;
  rep.extra = {upper_mean, lower_mean};
  const bool d1 = decayed(off_mass), d2 = decayed(upper_mean), d3 = decayed(lower_mean);
  rep.pass = d1 && d2 && d3;
  const auto stuck = [](const std::vector<double>& v) {
    return !v.empty() && v.front() > 0.0 && v.back() > v.front() / 2.0;
  };
  std::ostringstream os;
  if (rep.pass)
    os << "all three concentration functionals decayed (last <= first/10)";
  else if (stuck(off_mass) && stuck(upper_mean) && stuck(lower_mean))
    os << "consistent triple-fail: all three functionals stuck above half their initial value";
  else
    os << "mixed trends: decay flags " << d1 << d2 << d3;
  rep.detail = os.str();
  return rep;
}

}  // namespace ldlab
