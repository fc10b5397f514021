#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fl {

/// Raised on malformed input or an unrecognized key; the CLI maps it to
/// exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parsed key = value file.  Keys are stored section-qualified
/// ("run.alpha"); every key must appear under a [section] header.
struct Config {
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  /// Comma-separated list of numbers.
  std::vector<double> get_list(const std::string& key,
                               const std::vector<double>& fallback) const;
};

/// Every key the toolkit recognizes.  parse_config rejects anything else.
const std::set<std::string>& recognized_config_keys();

/// Grammar per line: blank, "# comment", "[section]", or "key = value".
/// Unknown section-qualified keys, keys outside a section, duplicate keys,
/// and malformed lines all raise ConfigError with the line number.  Pass
/// `known` to override the recognized-key set (tests).
Config parse_config(std::istream& in,
                    const std::set<std::string>* known = nullptr);
Config parse_config_file(const std::string& path,
                         const std::set<std::string>* known = nullptr);

/// FNV-1a over the sorted canonical "key=value" lines; reports carry it so
/// two runs are comparable only when their inputs match.
std::uint64_t config_hash(const Config& c);

}  // namespace fl
