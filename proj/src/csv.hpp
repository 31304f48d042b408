#pragma once

// Internal CSV helpers. The project's formats use plain comma-separated
// fields without quoting or embedded separators.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "courserec/errors.hpp"

namespace courserec::csv {

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

inline std::string strip(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

struct Location {
  std::string file;
  int line = 0;

  std::string str() const { return file + ":" + std::to_string(line); }
};

[[noreturn]] inline void fail(const Location& loc, const std::string& message) {
  throw ParseError(loc.str() + ": " + message);
}

inline long parse_int(const std::string& field, const Location& loc, const char* what) {
  const std::string s = strip(field);
  long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    fail(loc, std::string("invalid integer for ") + what + ": '" + field + "'");
  return value;
}

inline double parse_double(const std::string& field, const Location& loc, const char* what) {
  const std::string s = strip(field);
  try {
    size_t used = 0;
    double value = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return value;
  } catch (const std::exception&) {
    fail(loc, std::string("invalid number for ") + what + ": '" + field + "'");
  }
}

/// Reads a CSV file, checks the exact expected header, and hands each data
/// row (already split, with trailing CR removed) to the callback.
template <typename RowFn>
void for_each_row(const std::string& path, const std::string& expected_header, RowFn&& fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  Location loc{path, 0};
  if (!std::getline(in, line)) throw ParseError(path + ": empty file, expected header");
  loc.line = 1;
  if (strip(line) != expected_header)
    fail(loc, "expected header '" + expected_header + "', found '" + strip(line) + "'");
  while (std::getline(in, line)) {
    ++loc.line;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (strip(line).empty()) continue;
    fn(split(line), loc);
  }
}

inline std::string format_double(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

}  // namespace courserec::csv
