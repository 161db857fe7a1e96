#include "photodyn/io/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "photodyn/error.hpp"

namespace photodyn::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return true;
}

std::string qualify(const std::string& section, std::string_view key) {
  return section.empty() ? std::string(key) : section + "." + std::string(key);
}

}  // namespace

std::string section_of(const std::string& key) {
  const auto dot = key.find('.');
  return dot == std::string::npos ? std::string() : key.substr(0, dot);
}

Config Config::parse(std::string_view text, const std::string& source) {
  Config cfg;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);

    const auto hash = raw.find('#');
    std::string_view line = trim(hash == std::string_view::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!valid_name(name)) throw ConfigError(where + ": invalid section name '" + std::string(name) + "'");
      section = std::string(name);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    if (!valid_name(key)) throw ConfigError(where + ": invalid key '" + std::string(key) + "'");
    const std::string full = qualify(section, key);
    if (cfg.values_.count(full) != 0) throw ConfigError(where + ": duplicate key '" + full + "'");
    cfg.values_[full] = std::string(trim(line.substr(eq + 1)));
    cfg.origin_[full] = where;
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void Config::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(assignment) + "' must be key=value");
  const std::string key(trim(assignment.substr(0, eq)));
  const auto dot = key.find('.');
  const bool ok = dot == std::string::npos ? valid_name(key)
                                           : valid_name(std::string_view(key).substr(0, dot)) &&
                                                 valid_name(std::string_view(key).substr(dot + 1));
  if (!ok) throw ConfigError("invalid override key '" + key + "'");
  set(key, std::string(trim(assignment.substr(eq + 1))));
  origin_[key] = "command line";
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

void Config::erase(const std::string& key) {
  values_.erase(key);
  origin_.erase(key);
}

bool Config::has_section(const std::string& section) const {
  for (const auto& [k, v] : values_) {
    if (section_of(k) == section) return true;
  }
  return false;
}

std::optional<std::string> Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

namespace {

double parse_double(const std::string& key, const std::string& text) {
  const std::string_view s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
  }
  return v;
}

}  // namespace

double Config::get_double(const std::string& key, double fallback) const {
  return find_double(key).value_or(fallback);
}

std::optional<double> Config::find_double(const std::string& key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  return parse_double(key, *v);
}

long long Config::get_int(const std::string& key, long long fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  const std::string_view s = trim(*v);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + *v + "'");
  }
  return out;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "yes" || *v == "on" || *v == "1") return true;
  if (*v == "false" || *v == "no" || *v == "off" || *v == "0") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + *v + "'");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  auto v = get(key);
  if (!v) return out;
  std::string_view rest = *v;
  while (!trim(rest).empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    out.push_back(parse_double(key, std::string(item)));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

void Config::check_keys(const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : values_) {
    if (allowed.count(k) == 0) {
      auto o = origin_.find(k);
      const std::string where = o == origin_.end() ? std::string() : o->second + ": ";
      throw ConfigError(where + "unknown key '" + k + "'");
    }
  }
}

std::string Config::serialize(const std::set<std::string>& skip) const {
  std::map<std::string, std::map<std::string, std::string>> by_section;
  for (const auto& [k, v] : values_) {
    const std::string sec = section_of(k);
    if (skip.count(sec) != 0) continue;
    by_section[sec][sec.empty() ? k : k.substr(sec.size() + 1)] = v;
  }
  std::ostringstream out;
  bool first = true;
  for (const auto& [sec, kv] : by_section) {
    if (!first) out << "\n";
    first = false;
    if (!sec.empty()) out << "[" << sec << "]\n";
    for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
  }
  return out.str();
}

}  // namespace photodyn::io
