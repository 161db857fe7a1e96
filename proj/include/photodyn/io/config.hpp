#ifndef PHOTODYN_IO_CONFIG_HPP
#define PHOTODYN_IO_CONFIG_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace photodyn::io {

// Flat key/value file with [section] headers and '#' comments:
//
//   [model]
//   preset = emitter3-extended   # trailing comments allowed
//
// Keys are addressed as "section.key". Keys before any section header belong
// to the "" section and are addressed by the bare key.
class Config {
 public:
  static Config parse(std::string_view text, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);

  // "section.key=value", as given on the command line.
  void apply_override(std::string_view assignment);
  void set(const std::string& key, const std::string& value);
  void erase(const std::string& key);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  bool has_section(const std::string& section) const;
  std::optional<std::string> get(const std::string& key) const;

  // Typed getters throw ConfigError naming the key on malformed values.
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::optional<double> find_double(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;  // comma separated

  // Rejects keys that are not in `allowed` (fully qualified names).
  void check_keys(const std::set<std::string>& allowed) const;

  // Deterministic rendering, sections in lexical order. Sections listed in
  // `skip` are left out.
  std::string serialize(const std::set<std::string>& skip = {}) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> origin_;  // key -> "file:line" for messages
};

// Section part of "section.key".
std::string section_of(const std::string& key);

}  // namespace photodyn::io

#endif  // PHOTODYN_IO_CONFIG_HPP
