#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ldlab/bounds.hpp"
#include "ldlab/counting.hpp"
#include "ldlab/scan.hpp"
#include "ldlab/variation.hpp"

namespace ldlab {

using ojson = nlohmann::ordered_json;

// "%.17g" rendering: round-trip exact, byte-stable across runs. Infinities
// render as "inf"/"-inf".
std::string fmt_double(double v);

// Flat per-grid-point table; exact re-runs of the same config are
// byte-identical. Columns:
//   t,gamma,x,T,numerator,denominator,ratio,provenance,stderr,low_precision
std::string ratios_csv(const ScanOutcome& oc);

// Structured companion to the CSV: kind/mode/band/verdict plus per-scale
// aggregates and rows.
ojson ratios_json(const ScanOutcome& oc);

// Per-(n, v, T) sweep aggregates. Columns:
//   n,v,T,checks,violations,worst_ratio,worst_x
std::string bounds_csv(const BoundSweepResult& res);
ojson bounds_json(const BoundSweepResult& res);

ojson condition_json(const ConditionReport& rep);

// Index estimates for one tail function under one window.
struct IndexReport {
  std::string subject;    // which tail function (severity/window description)
  std::string method;     // "grid" | "analytic"
  std::string grid_spec;  // human-readable probe/epsilon/ladder description
  MatusIndices matus;
  LocalIndices local;
  std::vector<PotterCertificate> certificates;
};

ojson index_json(const IndexReport& rep);
ojson potter_json(const PotterCertificate& cert);
ojson power_decay_json(const PowerDecayReport& rep);

// One FNV-1a pass over the bytes; stable across platforms, used to fingerprint
// configs in the manifest.
std::uint64_t fnv1a(const std::string& bytes);

void write_text(const std::string& path, const std::string& body);
void write_json(const std::string& path, const ojson& j);

}  // namespace ldlab
