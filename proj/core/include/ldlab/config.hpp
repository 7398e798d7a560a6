#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ldlab/bounds.hpp"
#include "ldlab/counting.hpp"
#include "ldlab/scan.hpp"
#include "ldlab/severity.hpp"
#include "ldlab/simulate.hpp"
#include "ldlab/window.hpp"

namespace ldlab {

// Config files are a flat key/value tree (a TOML subset, see docs/config.md):
//   # comment
//   [section]
//   key = value        value: number | inf | true | false | "string" | word | [n, n, ...]
// Parse errors and validation errors carry file:line anchors. Every value an
// accessor touches — including applied defaults — lands in echo() so manifests
// list the complete effective configuration; keys never read are flagged by
// unused() as likely typos.
class ConfigTree {
 public:
  static ConfigTree parse_file(const std::string& path);
  static ConfigTree parse(const std::string& text, const std::string& name);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key, double def) const;
  std::int64_t integer(const std::string& section, const std::string& key) const;
  std::int64_t integer_or(const std::string& section, const std::string& key,
                          std::int64_t def) const;
  std::string str(const std::string& section, const std::string& key) const;
  std::string str_or(const std::string& section, const std::string& key,
                     const std::string& def) const;
  bool flag_or(const std::string& section, const std::string& key, bool def) const;
  std::vector<double> array(const std::string& section, const std::string& key) const;
  std::vector<double> array_or(const std::string& section, const std::string& key,
                               const std::vector<double>& def) const;

  // file:line anchor for a key (or the file name for a missing one)
  std::string where(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& msg) const;

  nlohmann::ordered_json echo() const { return echo_; }
  std::vector<std::string> unused() const;  // anchors of keys never accessed
  const std::string& name() const { return name_; }

 private:
  struct Entry {
    std::string raw;
    int line = 0;
    mutable bool used = false;
  };
  std::string name_;
  std::map<std::string, std::map<std::string, Entry>> tree_;
  mutable nlohmann::ordered_json echo_;

  const Entry* find(const std::string& section, const std::string& key) const;
  void note(const std::string& section, const std::string& key,
            const nlohmann::ordered_json& v) const;
};

// Section builders: construct validated model objects from their sections,
// applying the documented defaults. Each throws std::runtime_error with a
// file:line anchor on bad input.
SeverityModel build_severity(const ConfigTree& cfg);       // [severity]
Window build_window(const ConfigTree& cfg);                // [window], default T = inf
CountingModel build_counting(const ConfigTree& cfg);       // [counting]
PremiumProcess build_premium(const ConfigTree& cfg);       // [premium]
ScanSettings build_scan(const ConfigTree& cfg);            // [scan] (+window/premium/severity shift)
BoundSweepSettings build_bound_sweep(const ConfigTree& cfg);  // [bounds]

}  // namespace ldlab
