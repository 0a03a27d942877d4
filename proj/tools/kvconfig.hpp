#pragma once

// Minimal TOML-style key-value document: [section] headers, scalar keys
// (number / "string" / bare word / true / false) and flat arrays. Enough
// structure for archivable, diffable run configs without a full TOML
// dependency.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kvconfig {

struct Value {
  std::string raw;
  std::vector<std::string> items;  // filled for arrays
  bool is_array = false;
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class Document {
public:
  static Document parse(const std::string& text);

  bool has_section(const std::string& section) const {
    return sections_.count(section) > 0;
  }
  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         std::optional<std::string> fallback = {}) const;
  double get_number(const std::string& section, const std::string& key,
                    std::optional<double> fallback = {}) const;
  std::int64_t get_integer(const std::string& section, const std::string& key,
                           std::optional<std::int64_t> fallback = {}) const;
  std::vector<double> get_numbers(const std::string& section, const std::string& key,
                                  std::optional<std::vector<double>> fallback = {}) const;
  std::vector<std::string> get_strings(const std::string& section, const std::string& key,
                                       std::optional<std::vector<std::string>> fallback = {}) const;

  // Applies a "section.key=value" override string.
  void set_override(const std::string& assignment);

  const std::map<std::string, std::map<std::string, Value>>& sections() const {
    return sections_;
  }

private:
  const Value& lookup(const std::string& section, const std::string& key) const;
  std::map<std::string, std::map<std::string, Value>> sections_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

inline std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

inline Value parse_value(const std::string& raw_in, int line_no) {
  Value v;
  const std::string raw = trim(raw_in);
  if (raw.empty())
    throw ConfigError("line " + std::to_string(line_no) + ": empty value");
  if (raw.front() == '[') {
    if (raw.back() != ']')
      throw ConfigError("line " + std::to_string(line_no) + ": unterminated array");
    v.is_array = true;
    std::string body = raw.substr(1, raw.size() - 2);
    // Nested arrays flatten row-major: matrix rows are grouping only.
    for (char& c : body)
      if (c == '[' || c == ']') c = ' ';
    std::size_t start = 0;
    while (start <= body.size()) {
      std::size_t comma = body.find(',', start);
      const std::string item =
          trim(comma == std::string::npos ? body.substr(start) : body.substr(start, comma - start));
      if (!item.empty()) v.items.push_back(unquote(item));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    v.raw = raw;
  } else {
    v.raw = unquote(raw);
  }
  return v;
}

inline double to_number(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ConfigError(where + ": '" + s + "' is not a number");
  return v;
}

}  // namespace detail

inline Document Document::parse(const std::string& text) {
  Document doc;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string line =
        detail::trim(eol == std::string::npos ? text.substr(pos) : text.substr(pos, eol - pos));
    ++line_no;
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
      doc.sections_[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (section.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": key outside any [section]");
    doc.sections_[section][key] = detail::parse_value(line.substr(eq + 1), line_no);
  }
  return doc;
}

inline bool Document::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

inline const Value& Document::lookup(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) throw ConfigError("missing section [" + section + "]");
  auto k = s->second.find(key);
  if (k == s->second.end())
    throw ConfigError("missing key '" + key + "' in section [" + section + "]");
  return k->second;
}

inline std::string Document::get_string(const std::string& section, const std::string& key,
                                        std::optional<std::string> fallback) const {
  if (!has(section, key) && fallback) return *fallback;
  return lookup(section, key).raw;
}

inline double Document::get_number(const std::string& section, const std::string& key,
                                   std::optional<double> fallback) const {
  if (!has(section, key) && fallback) return *fallback;
  return detail::to_number(lookup(section, key).raw, "[" + section + "]." + key);
}

inline std::int64_t Document::get_integer(const std::string& section, const std::string& key,
                                          std::optional<std::int64_t> fallback) const {
  if (!has(section, key) && fallback) return *fallback;
  return static_cast<std::int64_t>(get_number(section, key));
}

inline std::vector<double> Document::get_numbers(
    const std::string& section, const std::string& key,
    std::optional<std::vector<double>> fallback) const {
  if (!has(section, key) && fallback) return *fallback;
  const Value& v = lookup(section, key);
  if (!v.is_array) throw ConfigError("[" + section + "]." + key + " must be an array");
  std::vector<double> out;
  for (const auto& item : v.items)
    out.push_back(detail::to_number(item, "[" + section + "]." + key));
  return out;
}

inline std::vector<std::string> Document::get_strings(
    const std::string& section, const std::string& key,
    std::optional<std::vector<std::string>> fallback) const {
  if (!has(section, key) && fallback) return *fallback;
  const Value& v = lookup(section, key);
  if (!v.is_array) throw ConfigError("[" + section + "]." + key + " must be an array");
  return v.items;
}

inline void Document::set_override(const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "' must look like section.key=value");
  const std::string path = detail::trim(assignment.substr(0, eq));
  const std::size_t dot = path.find('.');
  if (dot == std::string::npos)
    throw ConfigError("override '" + assignment + "' must name section.key");
  sections_[path.substr(0, dot)][path.substr(dot + 1)] =
      detail::parse_value(assignment.substr(eq + 1), 0);
}

}  // namespace kvconfig
