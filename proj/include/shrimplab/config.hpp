#pragma once

// Flat "section.key = value" run configuration with '#' comments.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace shrimplab {

class Config {
 public:
  /// Throws ConfigError with the key and 1-based line of the first malformed entry.
  static Config parse(std::istream& in);
  /// Throws IoError if the file cannot be read.
  static Config load(const std::filesystem::path& path);

  /// Applies a "key=value" override (line 0). Throws ConfigError.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value, int line = 0);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  /// Source line of a key, 0 for overrides and defaults.
  int line_of(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;

  /// Throws ConfigError for the first key outside `known` (exact names or "prefix.*").
  void require_known(const std::set<std::string>& known) const;

  /// Keys starting with `prefix`, in sorted order.
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  /// Records a value actually used so that it appears in the resolved dump.
  void note(const std::string& key, const std::string& value) const;
  /// "key = value" lines for every entry and every noted default, sorted by key.
  std::string resolved() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, Entry> entries_;
  mutable std::map<std::string, std::string> used_;

  const Entry* find(const std::string& key) const;
};

/// True for keys of the form name(.name)* with name = [a-z][a-z0-9_]*.
bool valid_config_key(const std::string& key);

}  // namespace shrimplab
