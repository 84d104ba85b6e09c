#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace perclab {

/// One `key = value` entry of a structured text document.
struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

/// Thrown for malformed documents; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
std::vector<KeyValue> parse_key_values(const std::string& text);

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);

}  // namespace perclab
