#include "ldlab/simulate.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "ldlab/compound.hpp"

namespace ldlab {

AliasTable::AliasTable(const std::vector<double>& masses) {
  const std::size_t K = masses.size();
  if (K == 0) throw std::invalid_argument("AliasTable: empty pmf");
  double total = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0)) throw std::invalid_argument("AliasTable: negative mass");
    total += m;
  }
  if (!(total > 0.0)) throw std::invalid_argument("AliasTable: zero total mass");
  prob_.assign(K, 1.0);
  alias_.resize(K);
  std::vector<double> scaled(K);
  for (std::size_t i = 0; i < K; ++i) {
    scaled[i] = masses[i] * static_cast<double>(K) / total;
    alias_[i] = static_cast<std::uint32_t>(i);
  }
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < K; ++i)
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // leftovers (either stack) keep prob 1 and self-alias
}

PoissonTable::PoissonTable(double mean) {
  if (!(mean > 0.0)) throw std::invalid_argument("PoissonTable: mean must be > 0");
  if (mean > 700.0) throw std::invalid_argument("PoissonTable: mean too large for direct pmf table");
  double pm = std::exp(-mean);
  double cum = pm;
  cdf_.push_back(cum);
  for (std::int64_t n = 1;; ++n) {
    pm *= mean / static_cast<double>(n);
    cum += pm;
    cdf_.push_back(cum);
    if (static_cast<double>(n) > mean && 1.0 - cum < 1e-15) break;
    if (n > 100000) throw std::runtime_error("PoissonTable: cdf did not close");
  }
}

McTally mc_window_hits_chunks(const LatticePmf& severity, double count_mean, std::int64_t shift_cells,
                              const LatticePmf* premium, const std::vector<CellWindow>& windows,
                              std::uint64_t samples, std::uint64_t root_seed,
                              std::uint64_t chunk_begin, std::uint64_t chunk_end,
                              bool count_is_fixed) {
  severity.validate();
  const AliasTable sev_table(severity.masses);
  std::optional<PoissonTable> count_table;
  std::int64_t fixed_count = 0;
  if (count_is_fixed) {
    fixed_count = std::llround(count_mean);
    if (fixed_count < 0) throw std::invalid_argument("mc_window_hits: negative fixed count");
  } else {
    count_table.emplace(count_mean);
  }
  const AliasTable* prem_table = nullptr;
  AliasTable prem_storage = premium ? AliasTable(premium->masses) : AliasTable({1.0});
  if (premium) prem_table = &prem_storage;

  McTally tally;
  tally.hits.assign(windows.size(), 0);
  for (std::uint64_t c = chunk_begin; c < chunk_end; ++c) {
    const std::uint64_t lo = c * kMcChunk;
    if (lo >= samples) break;
    const std::uint64_t n_here = std::min(kMcChunk, samples - lo);
    auto eng_count = make_engine({root_seed, stream::count, c});
    auto eng_sev = make_engine({root_seed, stream::severity, c});
    auto eng_prem = make_engine({root_seed, stream::premium, c});
    for (std::uint64_t s = 0; s < n_here; ++s) {
      const std::int64_t n_claims = count_is_fixed ? fixed_count : count_table->draw(eng_count);
      std::int64_t cells = n_claims * shift_cells;
      for (std::int64_t i = 0; i < n_claims; ++i)
        cells += static_cast<std::int64_t>(sev_table.draw(eng_sev));
      if (prem_table) cells -= static_cast<std::int64_t>(prem_table->draw(eng_prem));
      for (std::size_t w = 0; w < windows.size(); ++w)
        if (cells > windows[w].lo && cells <= windows[w].hi) ++tally.hits[w];
    }
    tally.samples += n_here;
  }
  return tally;
}

McTally mc_window_hits(const LatticePmf& severity, double count_mean, std::int64_t shift_cells,
                       const LatticePmf* premium, const std::vector<CellWindow>& windows,
                       std::uint64_t samples, std::uint64_t root_seed, bool count_is_fixed) {
  const std::uint64_t chunks = (samples + kMcChunk - 1) / kMcChunk;
  return mc_window_hits_chunks(severity, count_mean, shift_cells, premium, windows, samples,
                               root_seed, 0, chunks, count_is_fixed);
}

PremiumProcess PremiumProcess::deterministic_linear(double rate) {
  if (!(rate >= 0.0)) throw std::invalid_argument("PremiumProcess: linear rate must be >= 0");
  PremiumProcess out;
  out.family = Family::deterministic_linear;
  out.rate = rate;
  return out;
}

PremiumProcess PremiumProcess::compound_poisson(double rate, LatticePmf increment) {
  if (!(rate > 0.0)) throw std::invalid_argument("PremiumProcess: compound rate must be > 0");
  increment.validate();
  if (!(increment.mean() > 0.0))
    throw std::invalid_argument("PremiumProcess: increment mean must be > 0");
  PremiumProcess out;
  out.family = Family::compound_poisson;
  out.rate = rate;
  out.increment = std::move(increment);
  return out;
}

double PremiumProcess::b(double t) const {
  return family == Family::deterministic_linear ? rate * t : rate * t * increment.mean();
}

double PremiumProcess::sample(double t, std::mt19937_64& eng) const {
  if (family == Family::deterministic_linear) return rate * t;
  const CountingModel jumps(HomPoisson{rate});
  const std::int64_t n = jumps.sample(t, eng);
  double y = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double u = uniform01(eng);
    double acc = 0.0;
    std::size_t k = 0;
    for (; k + 1 < increment.masses.size(); ++k) {
      acc += increment.masses[k];
      if (u <= acc) break;
    }
    y += static_cast<double>(k) * increment.h;
  }
  return y;
}

std::string PremiumProcess::describe() const {
  if (family == Family::deterministic_linear)
    return "deterministic linear premium, rate " + std::to_string(rate);
  return "compound Poisson premium, rate " + std::to_string(rate) + ", mean increment " +
         std::to_string(increment.mean());
}

PathStreams make_path_streams(std::uint64_t root_seed, std::uint64_t chunk) {
  return PathStreams{make_engine({root_seed, stream::count, chunk}),
                     make_engine({root_seed, stream::severity, chunk}),
                     make_engine({root_seed, stream::premium, chunk})};
}

double simulate_random_sum(const SeverityModel& severity, const CountingModel& counting, double t,
                           PathStreams& s) {
  const std::int64_t n = counting.sample(t, s.count);
  double sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i) sum += severity.sample(s.severity);
  return sum;
}

double simulate_shifted_sum(const SeverityModel& severity, double c, const CountingModel& counting,
                            double t, PathStreams& s) {
  const std::int64_t n = counting.sample(t, s.count);
  double sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i) sum += severity.sample(s.severity);
  return sum + c * static_cast<double>(n);
}

double simulate_claim_surplus(const SeverityModel& severity, const CountingModel& counting,
                              const PremiumProcess& premium, double t, PathStreams& s) {
  const double claims = simulate_random_sum(severity, counting, t, s);
  return claims - premium.sample(t, s.premium);
}

EstimateWithError estimate_centered_interval(const SeverityModel& severity,
                                             const CountingModel& counting, double t, double x,
                                             Window w, std::uint64_t n_samples,
                                             std::uint64_t seed) {
  if (n_samples == 0) throw std::invalid_argument("estimate_centered_interval: need samples");
  const double mu = severity.mean();
  if (!std::isfinite(mu))
    throw std::domain_error("estimate_centered_interval: severity mean must be finite");
  const double center = mu * counting.lambda(t);
  std::uint64_t hits = 0, done = 0;
  const std::uint64_t chunks = (n_samples + kMcChunk - 1) / kMcChunk;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    const std::uint64_t n_here = std::min(kMcChunk, n_samples - done);
    PathStreams s = make_path_streams(seed, c);
    for (std::uint64_t i = 0; i < n_here; ++i)
      if (w.contains(x, simulate_random_sum(severity, counting, t, s) - center)) ++hits;
    done += n_here;
  }
  EstimateWithError out;
  out.n_samples = n_samples;
  out.seed = seed;
  out.estimate = static_cast<double>(hits) / static_cast<double>(n_samples);
  out.se = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(n_samples));
  return out;
}

ConditionReport check_premium_lln(const PremiumProcess& premium, const std::vector<double>& t_grid,
                                  double eps) {
  if (t_grid.empty()) throw std::invalid_argument("check_premium_lln: empty t grid");
  if (!(eps > 0.0) || !(eps < 1.0))
    throw std::invalid_argument("check_premium_lln: eps must lie in (0, 1)");
  ConditionReport rep;
  rep.condition = "premium_lln";
  rep.t_grid = t_grid;
  rep.eps = eps;
  bool all_zero = true;
  for (double t : t_grid) {
    double value = 0.0;
    if (premium.family == PremiumProcess::Family::compound_poisson) {
      const double bt = premium.b(t);
      const double mean_jumps = premium.rate * t;
      const double sigma = std::sqrt(mean_jumps * premium.increment.second_moment());
      const double h = premium.increment.h;
      const auto K =
          static_cast<std::size_t>(std::ceil(((1.0 + eps) * bt + 12.0 * sigma) / h)) + 2;
      // the recursion seeds at e^{-mean_jumps}, which underflows past ~700;
      // split into n iid compound pieces small enough to recurse, then convolve
      LatticePmf y;
      if (mean_jumps <= 600.0) {
        y = panjer_pmf(CountSpec::poisson(mean_jumps), premium.increment, K);
      } else {
        const auto n = static_cast<std::int64_t>(std::ceil(mean_jumps / 600.0));
        y = nfold_pmf(
            panjer_pmf(CountSpec::poisson(mean_jumps / static_cast<double>(n)),
                       premium.increment, K),
            n, K);
      }
      const LatticeTail view = aggregate_tail(y);
      const double up = view.tail((1.0 + eps) * bt);
      // P(Y < (1-eps) b) = P(Y <= prev) for the largest lattice point prev
      // strictly below the threshold
      const std::int64_t kprev =
          static_cast<std::int64_t>(std::ceil((1.0 - eps) * bt / h - 1e-9)) - 1;
      const double down = kprev < 0 ? 0.0 : 1.0 - view.tail(static_cast<double>(kprev) * h);
      value = up + down;
    }
    if (value != 0.0) all_zero = false;
    rep.values.push_back(value);
  }
  if (all_zero) {
    rep.pass = true;
    rep.detail = "premium LLN: exceedance probability identically zero";
    return rep;
  }
  bool mono = true;
  for (std::size_t i = rep.values.size() / 2; i + 1 < rep.values.size(); ++i)
    if (rep.values[i + 1] > rep.values[i] * (1.0 + 1e-9)) mono = false;
  const bool tenth = rep.values.back() <= rep.values.front() / 10.0;
  rep.pass = mono && tenth;
  std::ostringstream os;
  os << "premium LLN: exceedance " << rep.values.front() << " -> " << rep.values.back()
     << (rep.pass ? " decays" : " does not decay");
  rep.detail = os.str();
  return rep;
}

double nu_estimate(const PremiumProcess& premium, const CountingModel& counting,
                   const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("nu_estimate: empty t grid");
  double nu = 0.0;
  for (std::size_t i = t_grid.size() / 2; i < t_grid.size(); ++i) {
    const double lam = counting.lambda(t_grid[i]);
    if (!(lam > 0.0)) throw std::domain_error("nu_estimate: lambda(t) must be positive");
    nu = std::max(nu, premium.b(t_grid[i]) / lam);
  }
  return nu;
}

}  // namespace ldlab
