#include "ldlab/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "ldlab/bounds.hpp"
#include "ldlab/compound.hpp"
#include "ldlab/counting.hpp"
#include "ldlab/report_io.hpp"
#include "ldlab/scan.hpp"
#include "ldlab/severity.hpp"
#include "ldlab/variation.hpp"
#include "ldlab/window.hpp"

namespace ldlab {

namespace {

LatticePmf lattice(double h, std::vector<double> masses) {
  LatticePmf p;
  p.h = h;
  p.masses = std::move(masses);
  return p;
}

double entrywise_gap(const LatticePmf& a, const LatticePmf& b) {
  double worst = 0.0;
  const std::size_t n = std::min(a.masses.size(), b.masses.size());
  for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(a.masses[k] - b.masses[k]));
  return worst;
}

// criterion 1: the recursion against the independent convolution-mixture oracle
CriterionResult c1() {
  CriterionResult r{1, "compound oracle cross-validation", false, "", 0.0, 5.0};
  struct Case {
    CountSpec count;
    LatticePmf sev;
    std::size_t K;
  };
  const std::vector<Case> cases = {
      {CountSpec::poisson(2.0), lattice(1.0, {0.0, 0.5, 0.5}), 500},
      {CountSpec::poisson(5.0), lattice(0.5, {0.0, 0.2, 0.3, 0.5}), 500},
      {CountSpec::poisson(10.0), lattice(1.0, {0.0, 0.0, 0.0, 1.0}), 500},
      {CountSpec::negbin(3.0, 1.5), lattice(1.0, {0.0, 0.5, 0.5}), 500},
      {CountSpec::negbin(0.7, 2.0), lattice(1.0, {0.1, 0.4, 0.3, 0.2}), 400},
      {CountSpec::binomial(20, 0.3), lattice(0.5, {0.0, 0.25, 0.5, 0.25}), 300},
  };
  double worst = 0.0;
  for (const Case& c : cases) {
    const LatticePmf a = panjer_pmf(c.count, c.sev, c.K);
    const LatticePmf b = convolution_pmf(c.count, c.sev, c.K);
    worst = std::max(worst, entrywise_gap(a, b));
  }
  r.pass = worst <= 1e-10;
  std::ostringstream os;
  os << cases.size() << " count/severity configs, k <= 500: max entrywise gap " << worst
     << " (tol 1e-10)";
  r.detail = os.str();
  return r;
}

// criterion 2: hand-derived aggregate atoms
CriterionResult c2() {
  CriterionResult r{2, "hand-derived compound values", false, "", 0.0, 0.0};
  const LatticePmf g = panjer_pmf(CountSpec::poisson(2.0), lattice(1.0, {0.0, 0.5, 0.5}), 10);
  const double e2 = std::exp(-2.0);
  const double d0 = std::abs(g.masses[0] - e2);
  const double d1 = std::abs(g.masses[1] - e2);
  const double d2 = std::abs(g.masses[2] - 1.5 * e2);
  r.pass = d0 <= 1e-12 && d1 <= 1e-12 && d2 <= 1e-12;
  std::ostringstream os;
  os << "g0,g1,g2 vs {e^-2, e^-2, 1.5e^-2}: gaps " << d0 << ", " << d1 << ", " << d2
     << " (tol 1e-12)";
  r.detail = os.str();
  return r;
}

// criterion 3: the partial-sum window bound is never violated
CriterionResult c3() {
  CriterionResult r{3, "partial-sum window bound sweep", false, "", 0.0, 60.0};
  const SeverityModel pareto(Pareto{2.0, 1.0});
  const double spot =
      window_sum_bound(pareto, 2.0, 1.0, 5.0, 100.0, 1.0, Window::unbounded()).value();
  const double spot_gap = std::abs(spot - 0.2723281828459045);
  const BoundSweepResult sweep = bound_sweep(pareto, BoundSweepSettings{});
  r.pass = spot_gap <= 1e-12 && sweep.violations.empty();
  std::ostringstream os;
  os << sweep.detail << "; analytic spot gap " << spot_gap << " (tol 1e-12)";
  r.detail = os.str();
  return r;
}

ScanSettings fixed_count_settings() {
  ScanSettings s;
  s.kind = ScanKind::fixed_count;
  s.window = Window::of(1.0);
  s.h = 0.25;
  s.grid_end = 4096.0;
  s.scales = {10.0, 20.0, 40.0};
  return s;
}

std::string series_digest(const ScanOutcome& oc) {
  std::ostringstream os;
  os << "max|ratio-1| per scale:";
  for (const ScanSeries& s : oc.series) os << ' ' << s.max_abs_dev;
  os << "; final inf " << oc.series.back().inf_ratio << ", sup " << oc.series.back().sup_ratio;
  return os.str();
}

bool final_in_unit_band(const ScanOutcome& oc) {
  const ScanSeries& last = oc.series.back();
  return last.used_rows > 0 && last.inf_ratio >= 0.5 && last.sup_ratio <= 1.5;
}

// criterion 4: fixed-count ratios tighten as n grows
CriterionResult c4() {
  CriterionResult r{4, "fixed-count ratio trend", false, "", 0.0, 0.0};
  const ScanOutcome oc = run_scan(SeverityModel(Pareto{2.0, 1.25}), fixed_count_settings());
  r.pass = oc.trend_pass && final_in_unit_band(oc);
  r.detail = series_digest(oc);
  return r;
}

ScanSettings random_sum_settings(Window w) {
  ScanSettings s;
  s.kind = ScanKind::random_sum;
  s.window = w;
  s.h = 0.125;
  s.grid_end = 4096.0;
  s.scales = {50.0, 100.0, 200.0};
  return s;
}

// criterion 5: random-sum ratios tighten as the claim rate grows
CriterionResult c5() {
  CriterionResult r{5, "random-sum ratio trend", false, "", 0.0, 120.0};
  const SeverityModel sev(Pareto{2.0, 0.5});
  const ScanOutcome unbounded = run_scan(sev, random_sum_settings(Window::unbounded()));
  const ScanOutcome window1 = run_scan(sev, random_sum_settings(Window::of(1.0)));
  r.pass = unbounded.trend_pass && final_in_unit_band(unbounded) && window1.trend_pass &&
           final_in_unit_band(window1);
  r.detail = "T=inf: " + series_digest(unbounded) + " | T=1: " + series_digest(window1);
  return r;
}

// criterion 6: step-tail severity stays inside the squared local-index band
CriterionResult c6() {
  CriterionResult r{6, "step-tail band", false, "", 0.0, 0.0};
  const SeverityModel step(StepPareto{1.0});
  const auto probes = with_dyadic_brackets(log_grid(10.0, 1e6, 1200), 4, 19);
  const auto tail = [&](double x) { return step.tail(x); };
  const LocalIndices li = local_indices(tail, probes, default_local_eps());
  const bool indices_ok = std::abs(li.l - 0.5) <= 0.05 && std::abs(li.L - 2.0) <= 0.2;

  ScanSettings s;
  s.kind = ScanKind::random_sum;
  s.window = Window::unbounded();
  s.h = 1.0;
  s.grid_end = 2048.0;
  s.scales = {200.0};
  s.l_index = li.l;
  s.L_index = li.L;
  s.band_power = 2;
  const ScanOutcome oc = run_scan(step, s);
  r.pass = indices_ok && oc.band_checked && oc.band_pass;
  std::ostringstream os;
  os << "measured (l, L) = (" << li.l << ", " << li.L << "); inf "
     << oc.series.back().inf_ratio << ", sup " << oc.series.back().sup_ratio << " vs band ["
     << oc.band_lo << ", " << oc.band_hi << "]";
  r.detail = os.str();
  return r;
}

// criterion 7: zero shift reproduces the plain scan byte-for-byte; a real
// shift passes the squared band
CriterionResult c7() {
  CriterionResult r{7, "shifted-sum reduction and band", false, "", 0.0, 0.0};
  const SeverityModel sev(Pareto{2.0, 1.25});
  ScanSettings plain;
  plain.kind = ScanKind::random_sum;
  plain.window = Window::unbounded();
  plain.h = 0.25;
  plain.grid_end = 4096.0;
  plain.scales = {200.0};

  ScanSettings zero = plain;
  zero.kind = ScanKind::shifted_sum;
  zero.shift = 0.0;

  const std::string bytes_plain = ratios_csv(run_scan(sev, plain));
  const std::string bytes_zero = ratios_csv(run_scan(sev, zero));
  const bool reduction = bytes_plain == bytes_zero;

  ScanSettings shifted = zero;
  shifted.shift = -1.0;
  shifted.l_index = 1.0;  // intermediate-regular severity: l = L = 1
  shifted.L_index = 1.0;
  shifted.band_power = 2;
  const ScanOutcome oc = run_scan(sev, shifted);
  r.pass = reduction && oc.band_checked && oc.band_pass;
  std::ostringstream os;
  os << "c=0 bytes " << (reduction ? "identical" : "DIFFER") << "; c=-1 inf "
     << oc.series.back().inf_ratio << ", sup " << oc.series.back().sup_ratio << " vs band ["
     << oc.band_lo << ", " << oc.band_hi << "]";
  r.detail = os.str();
  return r;
}

// criterion 8: deterministic premium cancels exactly; compound premium passes
// the cubed band; the nu validation rejects small gamma
CriterionResult c8() {
  CriterionResult r{8, "surplus cancellation and band", false, "", 0.0, 0.0};
  const SeverityModel sev(Pareto{2.0, 0.5});
  ScanSettings base;
  base.kind = ScanKind::random_sum;
  base.window = Window::unbounded();
  base.h = 0.125;
  base.grid_end = 4096.0;
  base.scales = {200.0};

  ScanSettings cancel = base;
  cancel.kind = ScanKind::surplus;
  cancel.premium_total = 0.0;  // deterministic-linear premium
  const ScanOutcome plain = run_scan(sev, base);
  const ScanOutcome surplus0 = run_scan(sev, cancel);
  double num_gap = 0.0;
  for (std::size_t i = 0; i < plain.series[0].rows.size(); ++i)
    num_gap = std::max(num_gap, std::abs(plain.series[0].rows[i].numerator -
                                         surplus0.series[0].rows[i].numerator));

  ScanSettings comp = cancel;
  comp.premium_total = 100.0;  // b(t) = 100 at lambda = 200: nu-hat = 0.5
  comp.premium_jump = 1.0;
  comp.l_index = 1.0;
  comp.L_index = 1.0;
  comp.band_power = 3;
  const ScanOutcome oc = run_scan(sev, comp);

  bool rejected = false;
  try {
    ScanSettings bad = comp;
    bad.gamma = 0.4;  // below nu-hat
    run_scan(sev, bad);
  } catch (const std::invalid_argument&) {
    rejected = true;
  }

  r.pass = num_gap <= 1e-12 && oc.band_checked && oc.band_pass && rejected;
  std::ostringstream os;
  os << "cancellation numerator gap " << num_gap << " (tol 1e-12); compound inf "
     << oc.series.back().inf_ratio << ", sup " << oc.series.back().sup_ratio << " vs band ["
     << oc.band_lo << ", " << oc.band_hi << "]; gamma <= nu "
     << (rejected ? "rejected" : "NOT rejected");
  r.detail = os.str();
  return r;
}

// criterion 9: condition checkers pass the well-behaved count and catch the
// heavy mixture
CriterionResult c9() {
  CriterionResult r{9, "count condition checkers", false, "", 0.0, 0.0};
  const std::vector<double> ts = {10.0, 20.0, 40.0, 80.0, 160.0};
  const CountingModel hom(HomPoisson{1.0});
  const ConditionReport growth = check_truncated_moment_growth(hom, 2.0, 0.3, ts);
  const ConditionReport decay =
      check_lower_tail_decay(hom, SeverityModel(Pareto{2.0, 1.0}), Window::unbounded(), 0.5, ts);

  // dyadic scale mixture with an infinite second moment: weights 3*4^-j on
  // theta = 2^j/3 keep E Theta = 1 but E Theta^2 divergent
  std::vector<double> theta, weight;
  for (int j = 1; j <= 32; ++j) {
    theta.push_back(std::exp2(j) / 3.0);
    weight.push_back(3.0 * std::pow(4.0, -j));
  }
  const CountingModel heavy(MixedPoisson{1.0, theta, weight});
  const ConditionReport diverges =
      check_truncated_moment_growth(heavy, 2.0, 0.3, {10.0, 20.0, 40.0});

  const bool caught = !diverges.pass && diverges.detail.find("cap") != std::string::npos;
  r.pass = growth.pass && decay.pass && caught;
  std::ostringstream os;
  os << "moment growth " << (growth.pass ? "pass" : "FAIL") << "; lower-tail decay "
     << (decay.pass ? "pass" : "FAIL") << "; heavy mixture "
     << (caught ? "caught (" + diverges.detail + ")" : "NOT caught");
  r.detail = os.str();
  return r;
}

// criterion 10: sampling agrees with the oracle and replays bit-identically
CriterionResult c10() {
  CriterionResult r{10, "monte carlo / exact coherence", false, "", 0.0, 180.0};
  const SeverityModel sev(Pareto{2.0, 0.5});
  const ScanSettings exact_s = random_sum_settings(Window::unbounded());
  ScanSettings mc_s = exact_s;
  mc_s.mode = ScanMode::mc;
  const ScanOutcome exact = run_scan(sev, exact_s);
  const ScanOutcome mc = run_scan(sev, mc_s);
  const ScanOutcome mc2 = run_scan(sev, mc_s);
  const bool replay = ratios_csv(mc) == ratios_csv(mc2);

  std::size_t usable = 0, agree = 0;
  for (std::size_t si = 0; si < mc.series.size(); ++si)
    for (std::size_t i = 0; i < mc.series[si].rows.size(); ++i) {
      const ScanRow& m = mc.series[si].rows[i];
      if (m.low_precision) continue;
      ++usable;
      if (std::abs(m.ratio - exact.series[si].rows[i].ratio) <= 4.0 * m.se) ++agree;
    }
  const double frac = usable ? static_cast<double>(agree) / static_cast<double>(usable) : 0.0;
  r.pass = replay && usable > 0 && frac >= 0.95;
  std::ostringstream os;
  os << agree << "/" << usable << " resolved points within 4 stderr (need 95%); same-seed replay "
     << (replay ? "bit-identical" : "DIFFERS");
  r.detail = os.str();
  return r;
}

// criterion 11: tail-index estimators, certificates, and the decay rule
CriterionResult c11() {
  CriterionResult r{11, "tail index suite", false, "", 0.0, 0.0};
  const SeverityModel pareto(Pareto{2.0, 1.0});
  const SeverityModel step(StepPareto{1.0});
  const auto pareto_tail = [&](double x) { return pareto.tail(x); };
  const auto step_tail = [&](double x) { return step.tail(x); };

  const auto probes300 = log_grid(10.0, 1e6, 300);
  const auto probes_local = with_dyadic_brackets(log_grid(10.0, 1e6, 1200), 4, 19);

  const MatusIndices mp = matuszewska_indices(pareto_tail, probes300, default_matus_y());
  const LocalIndices lp = local_indices(pareto_tail, probes_local, default_local_eps());
  const LocalIndices ls = local_indices(step_tail, probes_local, default_local_eps());
  const bool pareto_ok = std::abs(mp.alpha + 2.0) <= 0.05 && std::abs(mp.beta + 2.0) <= 0.05 &&
                         std::abs(lp.l - 1.0) <= 0.02 && std::abs(lp.L - 1.0) <= 0.02;
  const bool step_ok = std::abs(ls.l - 0.5) <= 0.05 && std::abs(ls.L - 2.0) <= 0.2;

  const auto y = default_potter_y();
  const bool certs_ok = potter_search(pareto_tail, -1.5, true, probes300, y).feasible &&
                        potter_search(pareto_tail, -2.5, false, probes300, y).feasible &&
                        potter_search(step_tail, -0.5, true, probes300, y).feasible &&
                        potter_search(step_tail, -1.5, false, probes300, y).feasible;
  const PotterCertificate bad = potter_search(pareto_tail, -2.5, true, probes300, y);
  const bool infeasible_ok = !bad.feasible && !bad.violations.empty();

  const bool decay_ok = power_decay_check(pareto_tail, 3.0, 10.0, 1e4).pass &&
                        !power_decay_check(pareto_tail, 1.5, 10.0, 1e4).pass;

  r.pass = pareto_ok && step_ok && certs_ok && infeasible_ok && decay_ok;
  std::ostringstream os;
  os << "power tail (alpha, beta, l, L) = (" << mp.alpha << ", " << mp.beta << ", " << lp.l
     << ", " << lp.L << "); step (l, L) = (" << ls.l << ", " << ls.L << "); certificates "
     << (certs_ok ? "all valid" : "INVALID") << ", counterexample "
     << (infeasible_ok ? "rejected" : "NOT rejected") << "; decay rule "
     << (decay_ok ? "pass" : "FAIL");
  r.detail = os.str();
  return r;
}

}  // namespace

CriterionResult run_criterion(int id) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  switch (id) {
    case 1: r = c1(); break;
    case 2: r = c2(); break;
    case 3: r = c3(); break;
    case 4: r = c4(); break;
    case 5: r = c5(); break;
    case 6: r = c6(); break;
    case 7: r = c7(); break;
    case 8: r = c8(); break;
    case 9: r = c9(); break;
    case 10: r = c10(); break;
    case 11: r = c11(); break;
    default: throw std::out_of_range("run_criterion: id must be 1..11");
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.budget_seconds > 0.0 && r.seconds >= r.budget_seconds) {
    r.pass = false;
    r.detail += " [over the runtime budget]";
  }
  return r;
}

std::string format_criterion_line(const CriterionResult& r) {
  std::ostringstream os;
  os << "[criterion " << (r.id < 10 ? "0" : "") << r.id << "] " << (r.pass ? "PASS" : "FAIL")
     << " — " << r.title << " — " << r.detail << " (";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", r.seconds);
  os << buf;
  if (r.budget_seconds > 0.0) {
    std::snprintf(buf, sizeof buf, "%.0fs", r.budget_seconds);
    os << ", budget " << buf;
  }
  os << ")";
  return os.str();
}

std::vector<CriterionResult> run_acceptance() {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 11; ++id) out.push_back(run_criterion(id));
  return out;
}

}  // namespace ldlab
