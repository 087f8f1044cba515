#pragma once

// Small helpers shared by the plain-text file formats (overlap tables, run
// configs, CSV output).

#include <cstdio>
#include <istream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bhcav {

// Round-trippable representation of a double.
inline std::string format_exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Fixed 12-significant-digit representation used in CSV output.
inline std::string format_csv(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Reads `key = value` (or `key value`) lines; blank lines and '#' comments are
// skipped. Order is preserved.
inline std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& is) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::string key, value;
    if (const auto eq = line.find('='); eq != std::string::npos) {
      key = trim(line.substr(0, eq));
      value = trim(line.substr(eq + 1));
    } else if (const auto sp = line.find_first_of(" \t"); sp != std::string::npos) {
      key = trim(line.substr(0, sp));
      value = trim(line.substr(sp + 1));
    }
    if (key.empty() || value.empty()) {
      throw std::runtime_error("malformed key-value line " + std::to_string(lineno) + ": " +
                               line);
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

inline double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(text.substr(used)).size() != 0) {
    throw std::runtime_error("cannot parse number for " + what + ": '" + text + "'");
  }
  return v;
}

}  // namespace bhcav
