#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ldlab/report_io.hpp"

using Catch::Approx;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::StartsWith;
using namespace ldlab;

namespace {
ScanOutcome tiny_outcome() {
  ScanOutcome oc;
  oc.kind = ScanKind::random_sum;
  oc.mode = ScanMode::exact;
  oc.mu_hat = 0.5;
  oc.trend_pass = true;
  oc.pass = true;
  oc.detail = "demo";
  ScanSeries s;
  s.scale = 50.0;
  s.inf_ratio = 0.9;
  s.sup_ratio = 1.1;
  s.max_abs_dev = 0.1;
  s.used_rows = 2;
  ScanRow a;
  a.scale = 50.0;
  a.gamma = 1.0;
  a.x = 50.0;
  a.T = std::numeric_limits<double>::infinity();
  a.numerator = 0.1;
  a.denominator = 0.11;
  a.ratio = 0.1 / 0.11;
  a.provenance = "exact_panjer";
  ScanRow b = a;
  b.x = 62.5;
  s.rows = {a, b};
  oc.series = {s};
  return oc;
}
}  // namespace

TEST_CASE("doubles render round-trip exact and stable") {
  REQUIRE(fmt_double(1.0) == "1");
  REQUIRE(fmt_double(0.5) == "0.5");
  REQUIRE(fmt_double(0.1) == "0.10000000000000001");  // %.17g round-trips
  REQUIRE(fmt_double(std::numeric_limits<double>::infinity()) == "inf");
  REQUIRE(fmt_double(-std::numeric_limits<double>::infinity()) == "-inf");
  REQUIRE(fmt_double(-2.25) == "-2.25");
}

TEST_CASE("fnv1a matches the published test vectors") {
  REQUIRE(fnv1a("") == 14695981039346656037ull);
  REQUIRE(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  REQUIRE(fnv1a("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("ratio reports carry schema, columns, and byte stability") {
  const ScanOutcome oc = tiny_outcome();

  const std::string csv = ratios_csv(oc);
  REQUIRE_THAT(csv, StartsWith("t,gamma,x,T,numerator,denominator,ratio,provenance,stderr,low_precision\n"));
  // header + one line per row
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 3);
  REQUIRE_THAT(csv, ContainsSubstring("exact_panjer"));
  REQUIRE_THAT(csv, ContainsSubstring(",inf,"));  // T = inf renders as a word, not null
  REQUIRE(ratios_csv(oc) == csv);                 // same input, same bytes

  const ojson j = ratios_json(oc);
  REQUIRE(j["schema"] == "ldlab.ratios/1");
  REQUIRE(j.begin().key() == "schema");  // version is the first thing a reader sees
  REQUIRE(j["verdict"] == "PASS");
  REQUIRE(j["series"][0]["rows"].size() == 2);
  REQUIRE(j["series"][0]["rows"][0]["T"] == "inf");
}

TEST_CASE("bound reports carry schema and violations sample") {
  BoundSweepResult res;
  res.checks = 10;
  res.worst_ratio = 0.4;
  res.mu_hat = 2.25;
  res.c1 = 1.0;
  res.detail = "demo";
  BoundRow row;
  row.n = 3;
  row.v = 0.5;
  row.T = 1.0;
  row.checks = 10;
  row.worst_ratio = 0.4;
  row.worst_x = 2.5;
  res.rows = {row};

  REQUIRE_THAT(bounds_csv(res), StartsWith("n,v,T,checks,violations,worst_ratio,worst_x\n"));
  const ojson j = bounds_json(res);
  REQUIRE(j["schema"] == "ldlab.bounds/1");
  REQUIRE(j["violation_count"] == 0);
  REQUIRE(j["violations"].empty());
  REQUIRE(j["c1"] == 1.0);
}

TEST_CASE("condition and index reports serialize their traces") {
  ConditionReport rep;
  rep.condition = "truncated_moment_growth";
  rep.t_grid = {10.0, 20.0};
  rep.values = {2.0, 1.0};
  rep.p = 2.0;
  rep.delta = 0.3;
  rep.pass = true;
  rep.detail = "ok";
  const ojson j = condition_json(rep);
  REQUIRE(j["condition"] == "truncated_moment_growth");
  REQUIRE(j["values"].size() == 2);
  REQUIRE(j["pass"] == true);

  IndexReport ir;
  ir.subject = "pareto tail";
  ir.method = "grid";
  ir.matus.alpha = -2.0;
  ir.matus.beta = -2.0;
  ir.local.l = 0.998;
  ir.local.L = 1.002;
  PotterCertificate cert;
  cert.upper = true;
  cert.alpha = -1.5;
  cert.feasible = true;
  cert.c = 1.0;
  cert.x0 = 10.0;
  ir.certificates = {cert};
  const ojson ij = index_json(ir);
  REQUIRE(ij["schema"] == "ldlab.indices/1");
  REQUIRE(ij["alpha_upper"] == -2.0);
  REQUIRE(ij["beta_lower"] == -2.0);
  REQUIRE(ij["l_local"] == 0.998);
  REQUIRE(ij["L_local"] == 1.002);
  REQUIRE(ij["potter"].size() == 1);
  REQUIRE(ij["potter"][0]["feasible"] == true);
  REQUIRE(ij["potter"][0]["direction"] == "upper");
}

TEST_CASE("text and json writers hit the filesystem atomically enough to read back") {
  const std::string path = "test_report_io_tmp.txt";
  write_text(path, "alpha\nbeta\n");
  std::ifstream in(path, std::ios::binary);
  std::stringstream got;
  got << in.rdbuf();
  REQUIRE(got.str() == "alpha\nbeta\n");
  std::remove(path.c_str());

  const std::string jpath = "test_report_io_tmp.json";
  ojson j;
  j["k"] = 1;
  write_json(jpath, j);
  std::ifstream jin(jpath, std::ios::binary);
  std::stringstream jgot;
  jgot << jin.rdbuf();
  REQUIRE(jgot.str() == "{\n  \"k\": 1\n}\n");
  std::remove(jpath.c_str());

  REQUIRE_THROWS_AS(write_text("no_such_dir_zz/x.txt", "y"), std::runtime_error);
}
