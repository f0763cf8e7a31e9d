#include "tmppi/core/kv_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "tmppi/core/types.hpp"

namespace tmppi {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

// Strips a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quotes = !in_quotes;
    if (line[i] == '#' && !in_quotes) return line.substr(0, i);
  }
  return line;
}

std::vector<std::string> split_list(const std::string& key, const std::string& raw) {
  std::string body = trim(raw);
  if (body.empty() || body.front() != '[') return {unquote(body)};
  if (body.back() != ']') throw ConfigError("config key '" + key + "': unterminated list");
  body = body.substr(1, body.size() - 2);
  std::vector<std::string> items;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(unquote(item));
  }
  return items;
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
  return v;
}

long long to_int(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ConfigError("config key '" + key + "': expected an integer, got '" + text + "'");
  return v;
}

}  // namespace

KvConfig KvConfig::parse(const std::string& text) {
  KvConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') continue;  // TOML table headers are ignored
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (value.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty value for '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

KvConfig KvConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

void KvConfig::set(const std::string& key, const std::string& raw_value) { values_[key] = trim(raw_value); }

std::optional<std::string> KvConfig::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto r = raw(key);
  return r ? unquote(*r) : fallback;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
  auto r = raw(key);
  return r ? to_double(key, unquote(*r)) : fallback;
}

long long KvConfig::get_int(const std::string& key, long long fallback) const {
  auto r = raw(key);
  return r ? to_int(key, unquote(*r)) : fallback;
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
  auto r = raw(key);
  if (!r) return fallback;
  const std::string v = unquote(*r);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> KvConfig::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  auto r = raw(key);
  if (!r) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(key, *r)) out.push_back(to_double(key, item));
  return out;
}

std::vector<long long> KvConfig::get_ints(const std::string& key, const std::vector<long long>& fallback) const {
  auto r = raw(key);
  if (!r) return fallback;
  std::vector<long long> out;
  for (const auto& item : split_list(key, *r)) out.push_back(to_int(key, item));
  return out;
}

std::vector<std::string> KvConfig::get_strings(const std::string& key,
                                               const std::vector<std::string>& fallback) const {
  auto r = raw(key);
  return r ? split_list(key, *r) : fallback;
}

std::vector<std::string> KvConfig::keys() const {
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

std::string KvConfig::to_string() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace tmppi
