#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tmppi {

/// Plain-text `key = value` configuration.
///
/// One entry per line; `#` starts a comment; blank lines are ignored.
/// Values are scalars (`42`, `0.5`, `true`, `navigation`, `"quoted text"`)
/// or flat lists in brackets (`[50, 100, 200]`). Keys may contain dots
/// (`mppi.lambda`). Later entries override earlier ones. This is a strict
/// subset of TOML, so the files may carry a .toml extension.
class KvConfig {
 public:
  KvConfig() = default;

  /// Throws ConfigError with the line number on malformed input.
  static KvConfig parse(const std::string& text);
  /// Throws ConfigError if the file cannot be read or parsed.
  static KvConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& raw_value);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<long long> get_ints(const std::string& key, const std::vector<long long>& fallback) const;
  std::vector<std::string> get_strings(const std::string& key, const std::vector<std::string>& fallback) const;

  std::vector<std::string> keys() const;
  /// Serializes back to the same text format, keys sorted.
  std::string to_string() const;

 private:
  std::optional<std::string> raw(const std::string& key) const;
  std::map<std::string, std::string> values_;
};

}  // namespace tmppi
