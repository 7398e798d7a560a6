#include "ldlab/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ldlab {

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string ratios_csv(const ScanOutcome& oc) {
  std::ostringstream os;
  os << "t,gamma,x,T,numerator,denominator,ratio,provenance,stderr,low_precision\n";
  for (const ScanSeries& series : oc.series)
    for (const ScanRow& r : series.rows)
      os << fmt_double(r.scale) << ',' << fmt_double(r.gamma) << ',' << fmt_double(r.x) << ','
         << fmt_double(r.T) << ',' << fmt_double(r.numerator) << ',' << fmt_double(r.denominator)
         << ',' << fmt_double(r.ratio) << ',' << r.provenance << ',' << fmt_double(r.se) << ','
         << (r.low_precision ? 1 : 0) << '\n';
  return os.str();
}

ojson ratios_json(const ScanOutcome& oc) {
  ojson j;
  j["schema"] = "ldlab.ratios/1";
  j["kind"] = to_string(oc.kind);
  j["mode"] = to_string(oc.mode);
  j["mu_hat"] = oc.mu_hat;
  j["trend_pass"] = oc.trend_pass;
  j["band"] = {{"checked", oc.band_checked},
               {"lower", oc.band_lo},
               {"upper", oc.band_hi},
               {"pass", oc.band_pass}};
  j["verdict"] = oc.pass ? "PASS" : "FAIL";
  j["detail"] = oc.detail;
  j["warnings"] = oc.warnings;
  ojson series = ojson::array();
  for (const ScanSeries& s : oc.series) {
    ojson js;
    js["t"] = s.scale;
    js["inf_ratio"] = s.inf_ratio;
    js["sup_ratio"] = s.sup_ratio;
    js["max_abs_dev"] = s.max_abs_dev;
    js["used_rows"] = s.used_rows;
    ojson rows = ojson::array();
    for (const ScanRow& r : s.rows) {
      ojson jr;
      jr["x"] = r.x;
      jr["T"] = std::isinf(r.T) ? ojson("inf") : ojson(r.T);
      jr["numerator"] = r.numerator;
      jr["denominator"] = r.denominator;
      jr["ratio"] = r.ratio;
      jr["provenance"] = r.provenance;
      jr["stderr"] = r.se;
      jr["low_precision"] = r.low_precision;
      rows.push_back(std::move(jr));
    }
    js["rows"] = std::move(rows);
    series.push_back(std::move(js));
  }
  j["series"] = std::move(series);
  return j;
}

std::string bounds_csv(const BoundSweepResult& res) {
  std::ostringstream os;
  os << "n,v,T,checks,violations,worst_ratio,worst_x\n";
  for (const BoundRow& r : res.rows)
    os << r.n << ',' << fmt_double(r.v) << ',' << fmt_double(r.T) << ',' << r.checks << ','
       << r.violations << ',' << fmt_double(r.worst_ratio) << ',' << fmt_double(r.worst_x)
       << '\n';
  return os.str();
}

ojson bounds_json(const BoundSweepResult& res) {
  ojson j;
  j["schema"] = "ldlab.bounds/1";
  j["checks"] = res.checks;
  j["violation_count"] = res.violations.size();
  j["worst_ratio"] = res.worst_ratio;
  j["mu_hat"] = res.mu_hat;
  j["c1"] = res.c1;
  j["detail"] = res.detail;
  ojson bad = ojson::array();
  for (const BoundViolation& v : res.violations) {
    ojson jv;
    jv["n"] = v.n;
    jv["x"] = v.x;
    jv["v"] = v.v;
    jv["T"] = std::isinf(v.T) ? ojson("inf") : ojson(v.T);
    jv["prob"] = v.prob;
    jv["bound"] = v.bound;
    bad.push_back(std::move(jv));
    if (bad.size() >= 64) break;  // sample, not the full flood
  }
  j["violations"] = std::move(bad);
  return j;
}

ojson condition_json(const ConditionReport& rep) {
  ojson j;
  j["condition"] = rep.condition;
  j["p"] = rep.p;
  j["delta"] = rep.delta;
  j["eps"] = rep.eps;
  j["t_grid"] = rep.t_grid;
  j["values"] = rep.values;
  if (!rep.extra.empty()) j["extra"] = rep.extra;
  j["pass"] = rep.pass;
  j["detail"] = rep.detail;
  return j;
}

ojson potter_json(const PotterCertificate& cert) {
  ojson j;
  j["direction"] = cert.upper ? "upper" : "lower";
  j["alpha"] = cert.alpha;
  j["feasible"] = cert.feasible;
  j["c"] = cert.c;
  j["x0"] = cert.x0;
  ojson bad = ojson::array();
  for (const PotterViolation& v : cert.violations) {
    ojson jv;
    jv["x"] = v.x;
    jv["y"] = v.y;
    jv["ratio"] = v.ratio;
    jv["bound"] = v.bound;
    bad.push_back(std::move(jv));
  }
  j["violations"] = std::move(bad);
  return j;
}

ojson index_json(const IndexReport& rep) {
  ojson j;
  j["schema"] = "ldlab.indices/1";
  j["subject"] = rep.subject;
  j["method"] = rep.method;
  j["grid_spec"] = rep.grid_spec;
  j["alpha_upper"] = rep.matus.alpha;
  j["beta_lower"] = rep.matus.beta;
  j["l_local"] = rep.local.l;
  j["L_local"] = rep.local.L;
  ojson trace = ojson::array();
  for (std::size_t i = 0; i < rep.local.eps_seq.size(); ++i) {
    ojson je;
    je["eps"] = rep.local.eps_seq[i];
    je["min_ratio"] = rep.local.per_eps[i].first;
    je["max_ratio"] = rep.local.per_eps[i].second;
    trace.push_back(std::move(je));
  }
  j["per_eps"] = std::move(trace);
  ojson certs = ojson::array();
  for (const PotterCertificate& c : rep.certificates) certs.push_back(potter_json(c));
  j["potter"] = std::move(certs);
  return j;
}

ojson power_decay_json(const PowerDecayReport& rep) {
  ojson j;
  j["pass"] = rep.pass;
  j["decade_maxima"] = rep.decade_maxima;
  j["detail"] = rep.detail;
  return j;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << body;
  if (!f) throw std::runtime_error("write failed: " + path);
}

void write_json(const std::string& path, const ojson& j) {
  write_text(path, j.dump(2) + "\n");
}

}  // namespace ldlab
