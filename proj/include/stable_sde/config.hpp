#pragma once

#include <algorithm>
#include <cstdint>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"

// Sectioned key/value files:
//
//   # comment            ; comment
//   [section]
//   key = value
//
// Sections and keys are case-sensitive. A key may appear once per section.
// Lists are comma-separated. Every key must be consumed by the command that
// reads the file; anything left over is reported as unknown.

namespace stable_sde {

class RunConfig {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static RunConfig parse(std::string_view text, const std::set<std::string>& allowed_sections) {
    RunConfig cfg;
    std::string section;
    int line_no = 0;
    while (!text.empty()) {
      const auto nl = text.find('\n');
      std::string_view line = text.substr(0, nl);
      text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
      ++line_no;
      line = trim(line);
      if (line.empty() || line.front() == '#' || line.front() == ';') continue;
      if (line.front() == '[') {
        if (line.back() != ']') error(line_no, "unterminated section header");
        section = std::string(trim(line.substr(1, line.size() - 2)));
        if (!allowed_sections.count(section)) error(line_no, "unknown section [" + section + "]");
        if (cfg.sections_.count(section)) error(line_no, "duplicate section [" + section + "]");
        cfg.sections_[section];
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) error(line_no, "expected 'key = value'");
      if (section.empty()) error(line_no, "key outside of any section");
      const std::string key(trim(line.substr(0, eq)));
      if (key.empty()) error(line_no, "empty key");
      auto& keys = cfg.sections_[section];
      if (keys.count(key)) error(line_no, "duplicate key '" + key + "' in [" + section + "]");
      keys[key] = Entry{std::string(trim(line.substr(eq + 1))), line_no};
    }
    return cfg;
  }

  bool has_section(const std::string& s) const { return sections_.count(s) != 0; }

  void require_section(const std::string& s) const {
    if (!has_section(s)) fail(ErrorKind::ConfigError, "missing section [" + s + "]");
  }

  bool has(const std::string& s, const std::string& key) const {
    const auto it = sections_.find(s);
    return it != sections_.end() && it->second.count(key);
  }

  std::optional<std::string> text(const std::string& s, const std::string& key) {
    const auto it = sections_.find(s);
    if (it == sections_.end()) return std::nullopt;
    const auto kt = it->second.find(key);
    if (kt == it->second.end()) return std::nullopt;
    used_.insert({s, key});
    return kt->second.value;
  }

  std::string require_text(const std::string& s, const std::string& key) {
    auto v = text(s, key);
    if (!v) fail(ErrorKind::ConfigError, "missing key '" + key + "' in [" + s + "]");
    return *v;
  }

  std::optional<double> number(const std::string& s, const std::string& key) {
    auto v = text(s, key);
    if (!v) return std::nullopt;
    const auto d = parse_double(*v);
    if (!d) bad_value(s, key, "a number");
    return d;
  }

  double number_or(const std::string& s, const std::string& key, double fallback) {
    return number(s, key).value_or(fallback);
  }

  double require_number(const std::string& s, const std::string& key) {
    const auto v = number(s, key);
    if (!v) fail(ErrorKind::ConfigError, "missing key '" + key + "' in [" + s + "]");
    return *v;
  }

  std::optional<std::uint64_t> integer(const std::string& s, const std::string& key) {
    auto v = text(s, key);
    if (!v) return std::nullopt;
    std::uint64_t out = 0;
    auto res = std::from_chars(v->data(), v->data() + v->size(), out);
    if (v->empty() || res.ec != std::errc() || res.ptr != v->data() + v->size())
      bad_value(s, key, "a non-negative integer");
    return out;
  }

  std::optional<bool> flag(const std::string& s, const std::string& key) {
    auto v = text(s, key);
    if (!v) return std::nullopt;
    if (*v == "true") return true;
    if (*v == "false") return false;
    bad_value(s, key, "true or false");
  }

  std::optional<std::vector<double>> numbers(const std::string& s, const std::string& key) {
    auto v = text(s, key);
    if (!v) return std::nullopt;
    std::vector<double> out;
    std::string_view rest(*v);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto d = parse_double(rest.substr(0, comma));
      if (!d) bad_value(s, key, "a comma-separated list of numbers");
      out.push_back(*d);
      rest.remove_prefix(comma == std::string_view::npos ? rest.size() : comma + 1);
    }
    return out;
  }

  /// Fails on the first key that no reader asked for.
  void reject_unused() const {
    for (const auto& [section, keys] : sections_)
      for (const auto& [key, entry] : keys)
        if (!used_.count({section, key}))
          fail(ErrorKind::ConfigError,
               "unknown key '" + key + "' in [" + section + "] at line " + std::to_string(entry.line));
  }

 private:
  static std::string_view trim(std::string_view v) {
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t' || v.front() == '\r')) v.remove_prefix(1);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r')) v.remove_suffix(1);
    return v;
  }

  [[noreturn]] static void error(int line, const std::string& what) {
    fail(ErrorKind::ConfigError, "line " + std::to_string(line) + ": " + what);
  }

  [[noreturn]] void bad_value(const std::string& s, const std::string& key, const std::string& expected) const {
    const auto& e = sections_.at(s).at(key);
    fail(ErrorKind::ConfigError, "line " + std::to_string(e.line) + ": '" + key + "' in [" + s + "] must be " +
                                     expected + ", got '" + e.value + "'");
  }

  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::set<std::pair<std::string, std::string>> used_;
};

}  // namespace stable_sde
