#include "shrimplab/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "shrimplab/errors.hpp"

namespace shrimplab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(const std::string& key, int line) {
  std::string s = "'" + key + "'";
  if (line > 0) s += " (line " + std::to_string(line) + ")";
  return s;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(trim(tok));
  return out;
}

double to_double(const std::string& text, const std::string& key, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw ConfigError("config key " + where(key, line) + ": expected a finite number, got '" +
                          text + "'",
                      key, line);
  }
  return v;
}

int to_int(const std::string& text, const std::string& key, int line) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || v < -2147483647LL || v > 2147483647LL) {
    throw ConfigError("config key " + where(key, line) + ": expected an integer, got '" + text + "'",
                      key, line);
  }
  return static_cast<int>(v);
}

}  // namespace

bool valid_config_key(const std::string& key) {
  if (key.empty()) return false;
  bool at_start = true;
  for (char ch : key) {
    const unsigned char c = static_cast<unsigned char>(ch);
    if (ch == '.') {
      if (at_start) return false;
      at_start = true;
      continue;
    }
    if (at_start) {
      if (!std::islower(c)) return false;
      at_start = false;
    } else if (!std::islower(c) && !std::isdigit(c) && ch != '_') {
      return false;
    }
  }
  return !at_start;
}

Config Config::parse(std::istream& in) {
  Config cfg;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line) + ": expected 'key = value' for '" +
                            body + "'",
                        body, line);
    }
    cfg.set(trim(body.substr(0, eq)), trim(body.substr(eq + 1)), line);
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config " + path.string());
  return parse(f);
}

void Config::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + assignment + "': expected key=value", assignment, 0);
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), 0);
}

void Config::set(const std::string& key, const std::string& value, int line) {
  if (!valid_config_key(key)) {
    throw ConfigError("malformed config key " + where(key, line), key, line);
  }
  if (value.empty()) {
    throw ConfigError("config key " + where(key, line) + " has an empty value", key, line);
  }
  if (line > 0) {
    if (const auto it = entries_.find(key); it != entries_.end() && it->second.line > 0) {
      throw ConfigError("duplicate config key " + where(key, line), key, line);
    }
  }
  entries_[key] = Entry{value, line};
}

const Config::Entry* Config::find(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

int Config::line_of(const std::string& key) const {
  const Entry* e = find(key);
  return e ? e->line : 0;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const Entry* e = find(key);
  const std::string v = e ? e->value : fallback;
  note(key, v);
  return v;
}

double Config::get_double(const std::string& key, double fallback) const {
  const Entry* e = find(key);
  const double v = e ? to_double(e->value, key, e->line) : fallback;
  note(key, e ? e->value : fmt_double(v));
  return v;
}

int Config::get_int(const std::string& key, int fallback) const {
  const Entry* e = find(key);
  const int v = e ? to_int(e->value, key, e->line) : fallback;
  note(key, e ? e->value : std::to_string(v));
  return v;
}

std::vector<double> Config::get_doubles(const std::string& key,
                                        const std::vector<double>& fallback) const {
  const Entry* e = find(key);
  std::vector<double> out;
  std::string shown;
  if (e) {
    for (const std::string& t : split_list(e->value)) out.push_back(to_double(t, key, e->line));
    shown = e->value;
  } else {
    out = fallback;
    for (std::size_t i = 0; i < out.size(); ++i) shown += (i ? "," : "") + fmt_double(out[i]);
  }
  note(key, shown);
  return out;
}

std::vector<int> Config::get_ints(const std::string& key, const std::vector<int>& fallback) const {
  const Entry* e = find(key);
  std::vector<int> out;
  std::string shown;
  if (e) {
    for (const std::string& t : split_list(e->value)) out.push_back(to_int(t, key, e->line));
    shown = e->value;
  } else {
    out = fallback;
    for (std::size_t i = 0; i < out.size(); ++i) shown += (i ? "," : "") + std::to_string(out[i]);
  }
  note(key, shown);
  return out;
}

void Config::require_known(const std::set<std::string>& known) const {
  for (const auto& [key, entry] : entries_) {
    bool ok = known.count(key) != 0;
    for (auto dot = key.rfind('.'); !ok && dot != std::string::npos;
         dot = dot == 0 ? std::string::npos : key.rfind('.', dot - 1)) {
      ok = known.count(key.substr(0, dot) + ".*") != 0;
    }
    if (!ok) throw ConfigError("unknown config key " + where(key, entry.line), key, entry.line);
  }
}

std::vector<std::string> Config::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [key, entry] : entries_) {
    if (key.rfind(prefix, 0) == 0) out.push_back(key);
  }
  return out;
}

void Config::note(const std::string& key, const std::string& value) const { used_[key] = value; }

std::string Config::resolved() const {
  std::map<std::string, std::string> all = used_;
  for (const auto& [key, entry] : entries_) all[key] = entry.value;
  std::string out;
  for (const auto& [key, value] : all) out += key + " = " + value + "\n";
  return out;
}

}  // namespace shrimplab
