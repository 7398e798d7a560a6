#include "ldlab/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ldlab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// cut an unquoted # comment
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    else if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

bool parse_number(const std::string& raw, double* out) {
  std::string s = raw;
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  if (s.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

}  // namespace

ConfigTree ConfigTree::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream body;
  body << f.rdbuf();
  return parse(body.str(), path);
}

ConfigTree ConfigTree::parse(const std::string& text, const std::string& name) {
  ConfigTree tree;
  tree.name_ = name;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const std::string anchor = name + ":" + std::to_string(lineno);
    if (body.front() == '[') {
      if (body.back() != ']') throw std::runtime_error(anchor + ": unterminated section header");
      section = trim(body.substr(1, body.size() - 2));
      if (!valid_name(section)) throw std::runtime_error(anchor + ": bad section name");
      tree.tree_[section];  // empty sections are legal
      continue;
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(anchor + ": expected 'key = value' or '[section]'");
    const std::string key = trim(body.substr(0, eq));
    const std::string raw = trim(body.substr(eq + 1));
    if (!valid_name(key)) throw std::runtime_error(anchor + ": bad key name");
    if (raw.empty()) throw std::runtime_error(anchor + ": empty value");
    if (section.empty()) throw std::runtime_error(anchor + ": key before any [section]");
    auto& slot = tree.tree_[section][key];
    if (slot.line != 0) throw std::runtime_error(anchor + ": duplicate key '" + key + "'");
    slot.raw = raw;
    slot.line = lineno;
  }
  return tree;
}

const ConfigTree::Entry* ConfigTree::find(const std::string& section,
                                          const std::string& key) const {
  const auto s = tree_.find(section);
  if (s == tree_.end()) return nullptr;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return nullptr;
  k->second.used = true;
  return &k->second;
}

void ConfigTree::note(const std::string& section, const std::string& key,
                      const nlohmann::ordered_json& v) const {
  // JSON has no infinity literal (nlohmann would emit null), so echo the
  // config grammar's spelling instead
  const auto fix = [](const nlohmann::ordered_json& x) -> nlohmann::ordered_json {
    if (x.is_number_float() && std::isinf(x.get<double>()))
      return x.get<double>() > 0 ? "inf" : "-inf";
    return x;
  };
  if (v.is_array()) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& x : v) arr.push_back(fix(x));
    echo_[section][key] = std::move(arr);
  } else {
    echo_[section][key] = fix(v);
  }
}

bool ConfigTree::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

bool ConfigTree::has_section(const std::string& section) const {
  return tree_.count(section) > 0;
}

std::string ConfigTree::where(const std::string& section, const std::string& key) const {
  const auto s = tree_.find(section);
  if (s != tree_.end()) {
    const auto k = s->second.find(key);
    if (k != s->second.end()) return name_ + ":" + std::to_string(k->second.line);
  }
  return name_ + ": [" + section + "] " + key;
}

void ConfigTree::fail(const std::string& section, const std::string& key,
                      const std::string& msg) const {
  throw std::runtime_error(where(section, key) + ": " + msg);
}

double ConfigTree::number(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) fail(section, key, "missing required number");
  double v = 0.0;
  if (!parse_number(e->raw, &v)) fail(section, key, "not a number: " + e->raw);
  note(section, key, v);
  return v;
}

double ConfigTree::number_or(const std::string& section, const std::string& key,
                             double def) const {
  if (!has(section, key)) {
    note(section, key, def);
    return def;
  }
  return number(section, key);
}

std::int64_t ConfigTree::integer(const std::string& section, const std::string& key) const {
  const double v = number(section, key);
  const auto n = static_cast<std::int64_t>(std::llround(v));
  if (std::abs(v - static_cast<double>(n)) > 1e-9) fail(section, key, "expected an integer");
  note(section, key, n);
  return n;
}

std::int64_t ConfigTree::integer_or(const std::string& section, const std::string& key,
                                    std::int64_t def) const {
  if (!has(section, key)) {
    note(section, key, def);
    return def;
  }
  return integer(section, key);
}

std::string ConfigTree::str(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) fail(section, key, "missing required string");
  std::string s = e->raw;
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  if (!s.empty() && s.front() == '[') fail(section, key, "expected a string, found an array");
  note(section, key, s);
  return s;
}

std::string ConfigTree::str_or(const std::string& section, const std::string& key,
                               const std::string& def) const {
  if (!has(section, key)) {
    note(section, key, def);
    return def;
  }
  return str(section, key);
}

bool ConfigTree::flag_or(const std::string& section, const std::string& key, bool def) const {
  if (!has(section, key)) {
    note(section, key, def);
    return def;
  }
  const std::string s = str(section, key);
  if (s == "true") {
    note(section, key, true);
    return true;
  }
  if (s == "false") {
    note(section, key, false);
    return false;
  }
  fail(section, key, "expected true or false");
}

std::vector<double> ConfigTree::array(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) fail(section, key, "missing required array");
  const std::string& raw = e->raw;
  if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']')
    fail(section, key, "expected [v1, v2, ...]");
  std::vector<double> out;
  std::string body = raw.substr(1, raw.size() - 2);
  std::size_t pos = 0;
  while (pos <= body.size()) {
    const std::size_t comma = body.find(',', pos);
    const std::string item =
        trim(comma == std::string::npos ? body.substr(pos) : body.substr(pos, comma - pos));
    if (!item.empty()) {
      double v = 0.0;
      if (!parse_number(item, &v)) fail(section, key, "array element is not a number: " + item);
      out.push_back(v);
    } else if (comma != std::string::npos || !out.empty()) {
      if (comma != std::string::npos) fail(section, key, "empty array element");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  note(section, key, out);
  return out;
}

std::vector<double> ConfigTree::array_or(const std::string& section, const std::string& key,
                                         const std::vector<double>& def) const {
  if (!has(section, key)) {
    note(section, key, def);
    return def;
  }
  return array(section, key);
}

std::vector<std::string> ConfigTree::unused() const {
  std::vector<std::string> out;
  for (const auto& [section, keys] : tree_)
    for (const auto& [key, entry] : keys)
      if (!entry.used)
        out.push_back(name_ + ":" + std::to_string(entry.line) + ": unknown key '" + section +
                      "." + key + "' (never read)");
  return out;
}

namespace {

[[noreturn]] void rethrow_anchored(const ConfigTree& cfg, const std::string& section,
                                   const std::string& key, const std::exception& e) {
  throw std::runtime_error(cfg.where(section, key) + ": " + e.what());
}

Rounding parse_rounding(const ConfigTree& cfg, const std::string& section,
                        const std::string& def) {
  const std::string s = cfg.str_or(section, "rounding", def);
  if (s == "up") return Rounding::up;
  if (s == "down") return Rounding::down;
  if (s == "midpoint") return Rounding::midpoint;
  cfg.fail(section, "rounding", "expected up, down, or midpoint");
}

}  // namespace

SeverityModel build_severity(const ConfigTree& cfg) {
  const std::string family = cfg.str("severity", "family");
  try {
    if (family == "pareto")
      return SeverityModel(
          Pareto{cfg.number("severity", "alpha"), cfg.number_or("severity", "xm", 1.0)});
    if (family == "step_pareto")
      return SeverityModel(StepPareto{cfg.number_or("severity", "alpha", 1.0)});
    if (family == "lattice") {
      LatticePmf pmf;
      pmf.h = cfg.number("severity", "h");
      pmf.masses = cfg.array("severity", "masses");
      return SeverityModel(pmf);
    }
  } catch (const std::runtime_error&) {
    throw;  // already anchored
  } catch (const std::exception& e) {
    rethrow_anchored(cfg, "severity", "family", e);
  }
  cfg.fail("severity", "family", "unknown family '" + family +
                                     "' (expected pareto, step_pareto, or lattice)");
}

Window build_window(const ConfigTree& cfg) {
  const double T = cfg.number_or("window", "T", std::numeric_limits<double>::infinity());
  if (std::isinf(T) && T > 0) return Window::unbounded();
  try {
    return Window::of(T);
  } catch (const std::exception& e) {
    rethrow_anchored(cfg, "window", "T", e);
  }
}

CountingModel build_counting(const ConfigTree& cfg) {
  const std::string family = cfg.str("counting", "family");
  try {
    if (family == "poisson") return CountingModel(HomPoisson{cfg.number("counting", "rate")});
    if (family == "deterministic")
      return CountingModel(DeterministicCount{cfg.number("counting", "rate")});
    if (family == "mixed_poisson")
      return CountingModel(MixedPoisson{cfg.number("counting", "rate"),
                                        cfg.array("counting", "theta"),
                                        cfg.array("counting", "weight")});
  } catch (const std::runtime_error&) {
    throw;
  } catch (const std::exception& e) {
    rethrow_anchored(cfg, "counting", "family", e);
  }
  cfg.fail("counting", "family", "unknown family '" + family +
                                     "' (expected poisson, mixed_poisson, or deterministic)");
}

PremiumProcess build_premium(const ConfigTree& cfg) {
  const std::string family = cfg.str_or("premium", "family", "compound_poisson");
  try {
    if (family == "linear")
      return PremiumProcess::deterministic_linear(cfg.number("premium", "rate"));
    if (family == "compound_poisson") {
      const double jump = cfg.number_or("premium", "jump", 1.0);
      if (!(jump > 0.0)) cfg.fail("premium", "jump", "jump must be > 0");
      LatticePmf inc;
      inc.h = jump;
      inc.masses = {0.0, 1.0};  // one point mass at `jump`
      return PremiumProcess::compound_poisson(cfg.number("premium", "rate"), inc);
    }
  } catch (const std::runtime_error&) {
    throw;
  } catch (const std::exception& e) {
    rethrow_anchored(cfg, "premium", "family", e);
  }
  cfg.fail("premium", "family",
           "unknown family '" + family + "' (expected linear or compound_poisson)");
}

ScanSettings build_scan(const ConfigTree& cfg) {
  ScanSettings s;
  const std::string kind = cfg.str("scan", "kind");
  if (kind == "fixed_count") s.kind = ScanKind::fixed_count;
  else if (kind == "random_sum") s.kind = ScanKind::random_sum;
  else if (kind == "shifted_sum") s.kind = ScanKind::shifted_sum;
  else if (kind == "surplus") s.kind = ScanKind::surplus;
  else cfg.fail("scan", "kind",
                "unknown kind '" + kind +
                    "' (expected fixed_count, random_sum, shifted_sum, or surplus)");

  const std::string mode = cfg.str_or("scan", "mode", "exact");
  if (mode == "exact") s.mode = ScanMode::exact;
  else if (mode == "mc") s.mode = ScanMode::mc;
  else cfg.fail("scan", "mode", "expected exact or mc");

  s.window = build_window(cfg);
  s.gamma = cfg.number_or("scan", "gamma", 1.0);
  s.scales = cfg.array("scan", "scales");
  s.h = cfg.number_or("scan", "h", 0.125);
  s.grid_end = cfg.number_or("scan", "grid_end", 4096.0);
  s.rounding = parse_rounding(cfg, "scan", "midpoint");
  s.x_factor = cfg.number_or("scan", "x_factor", 10.0);
  s.x_points = static_cast<int>(cfg.integer_or("scan", "x_points", 25));
  s.shift = cfg.number_or("scan", "shift", 0.0);
  s.premium_total = cfg.number_or("scan", "premium_total", 0.0);
  s.premium_jump = cfg.number_or("scan", "premium_jump", 1.0);
  s.mc_samples = static_cast<std::uint64_t>(cfg.integer_or("scan", "n_samples", 1'000'000));
  s.seed = static_cast<std::uint64_t>(cfg.integer_or("scan", "seed", 20260819));
  s.l_index = cfg.number_or("scan", "l_index", 0.0);
  s.L_index = cfg.number_or("scan", "L_index", 0.0);
  s.band_slack = cfg.number_or("scan", "slack", 0.25);
  s.trend_slack = cfg.number_or("scan", "trend_slack", 0.05);
  switch (s.kind) {  // sandwich exponent per scan type
    case ScanKind::fixed_count: s.band_power = 1; break;
    case ScanKind::random_sum:
    case ScanKind::shifted_sum: s.band_power = 2; break;
    case ScanKind::surplus: s.band_power = 3; break;
  }
  return s;
}

BoundSweepSettings build_bound_sweep(const ConfigTree& cfg) {
  BoundSweepSettings s;
  s.h = cfg.number_or("bounds", "h", 0.5);
  s.grid_end = cfg.number_or("bounds", "grid_end", 2048.0);
  s.rounding = parse_rounding(cfg, "bounds", "up");
  s.n_max = static_cast<int>(cfg.integer_or("bounds", "n_max", 50));
  s.x_lo = cfg.number_or("bounds", "x_lo", 2.0);
  s.x_hi = cfg.number_or("bounds", "x_hi", 1000.0);
  s.v_list = cfg.array_or("bounds", "v", {0.5, 1.0});
  const std::vector<double> Ts =
      cfg.array_or("bounds", "T", {1.0, std::numeric_limits<double>::infinity()});
  s.windows.clear();
  for (double T : Ts) {
    try {
      s.windows.push_back(std::isinf(T) && T > 0 ? Window::unbounded() : Window::of(T));
    } catch (const std::exception& e) {
      rethrow_anchored(cfg, "bounds", "T", e);
    }
  }
  return s;
}

}  // namespace ldlab
