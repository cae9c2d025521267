#pragma once

#include <fstream>
#include <map>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace cyclefind {

/// key = value lines; '#' starts a comment, blank lines ignored, keys and
/// values trimmed. Later duplicates override earlier ones.
inline std::map<std::string, std::string> parse_config(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string_view s = line;
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
      s.remove_suffix(1);
    if (s.empty()) continue;
    const std::size_t eq = s.find('=');
    if (eq == std::string_view::npos)
      throw parse_error("config line " + std::to_string(line_no) +
                            ": expected key = value",
                        line_no);
    std::string_view key = s.substr(0, eq), val = s.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t'))
      key.remove_suffix(1);
    while (!val.empty() && (val.front() == ' ' || val.front() == '\t'))
      val.remove_prefix(1);
    if (key.empty())
      throw parse_error("config line " + std::to_string(line_no) + ": empty key",
                        line_no);
    out[std::string(key)] = std::string(val);
  }
  return out;
}

inline std::map<std::string, std::string> parse_config_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open config " + path);
  return parse_config(in);
}

}  // namespace cyclefind
