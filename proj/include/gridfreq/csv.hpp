#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gridfreq/errors.hpp"

namespace gridfreq::csv {

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  // tolerate trailing \r from CRLF files
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
  return out;
}

inline double to_double(const std::string& s, const std::string& where) {
  double v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    raise(ErrorKind::ParseError, "bad numeric field '" + s + "' at " + where);
  return v;
}

inline long to_long(const std::string& s, const std::string& where) {
  long v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    raise(ErrorKind::ParseError, "bad integer field '" + s + "' at " + where);
  return v;
}

/// Round-trip exact double formatting, locale independent.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path, bool append = false)
      : out_(path, append ? std::ios::app : std::ios::trunc) {
    if (!out_) raise(ErrorKind::IoError, "cannot open for write: " + path.string());
  }

  void row(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

  void raw(const std::string& line) { out_ << line << '\n'; }
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

/// Reads all lines, skipping a mandatory header which must equal `expect_header`.
inline std::vector<std::string> read_lines_checked(const std::filesystem::path& path,
                                                   const std::string& expect_header) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::IoError, "cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) raise(ErrorKind::ParseError, "empty file: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expect_header)
    raise(ErrorKind::ParseError, "unexpected header '" + line + "' in " + path.string() +
                                     " (want '" + expect_header + "')");
  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) rows.push_back(line);
  }
  return rows;
}

}  // namespace gridfreq::csv
