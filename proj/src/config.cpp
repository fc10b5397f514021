#include "fl/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fl {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_ident(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')
    return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << "config line " << line << ": " << what;
  throw ConfigError(os.str());
}

}  // namespace

bool Config::has(const std::string& key) const { return values.count(key) > 0; }

const std::string& Config::get(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw ConfigError("config key not set: " + key);
  return it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = get(key);
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config key " + key + ": not a number: " + v);
  return x;
}

std::int64_t Config::get_int(const std::string& key,
                             std::int64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = get(key);
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config key " + key + ": not an integer: " + v);
  return x;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

std::vector<double> Config::get_list(const std::string& key,
                                     const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw ConfigError("config key " + key + ": empty list element");
    char* end = nullptr;
    const double x = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0')
      throw ConfigError("config key " + key + ": not a number: " + item);
    out.push_back(x);
  }
  if (out.empty()) throw ConfigError("config key " + key + ": empty list");
  return out;
}

const std::set<std::string>& recognized_config_keys() {
  static const std::set<std::string> keys = {
      // run parameters shared by the CLI subcommands
      "run.alpha", "run.p", "run.theta", "run.lambda", "run.grid",
      "run.steps", "run.paths", "run.dt", "run.seed", "run.t", "run.out",
      "run.format",
      // sweep grids; comma-separated lists
      "sweep.alphas", "sweep.ps", "sweep.thetas", "sweep.lambdas",
      "sweep.ts", "sweep.gamma0s", "sweep.gamma1s", "sweep.ladder",
      "sweep.nodes",
      // contract thresholds, recorded in every report
      "thresholds.kernel_spread", "thresholds.operator_spread",
      "thresholds.divergence_flag", "thresholds.stability_drift",
      "thresholds.decay_tol",
  };
  return keys;
}

Config parse_config(std::istream& in, const std::set<std::string>* known) {
  const std::set<std::string>& keys =
      known ? *known : recognized_config_keys();
  Config cfg;
  std::string section, line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(ln, "unterminated section header: " + s);
      section = trim(s.substr(1, s.size() - 2));
      if (!valid_ident(section)) fail(ln, "bad section name: " + section);
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail(ln, "expected key = value: " + s);
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (!valid_ident(key)) fail(ln, "bad key name: " + key);
    if (val.empty()) fail(ln, "empty value for key: " + key);
    if (section.empty()) fail(ln, "key outside any [section]: " + key);
    const std::string qual = section + "." + key;
    if (!keys.count(qual)) fail(ln, "unknown key: " + qual);
    if (cfg.values.count(qual)) fail(ln, "duplicate key: " + qual);
    cfg.values[qual] = val;
  }
  return cfg;
}

Config parse_config_file(const std::string& path,
                         const std::set<std::string>* known) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in, known);
}

std::uint64_t config_hash(const Config& c) {
  std::uint64_t h = 1469598103934665603ull;
  const auto feed = [&h](const std::string& s) {
    for (char ch : s) {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ull;
    }
  };
  for (const auto& [k, v] : c.values) {  // std::map iterates sorted
    feed(k);
    feed("=");
    feed(v);
    feed("\n");
  }
  return h;
}

}  // namespace fl
