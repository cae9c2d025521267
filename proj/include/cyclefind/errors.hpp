#pragma once

#include <stdexcept>
#include <string>

namespace cyclefind {

/// Bad caller-supplied argument or configuration. CLI exit code 1.
class invalid_argument : public std::invalid_argument {
 public:
  explicit invalid_argument(const std::string& what_arg)
      : std::invalid_argument(what_arg) {}
};

/// Malformed input data; line() is 1-based when known, -1 otherwise.
/// CLI exit code 2.
class parse_error : public std::runtime_error {
 public:
  explicit parse_error(const std::string& what_arg, long line = -1)
      : std::runtime_error(what_arg), line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

/// Too little usable data to produce a result. CLI exit code 2.
class insufficient_data : public std::runtime_error {
 public:
  explicit insufficient_data(const std::string& what_arg)
      : std::runtime_error(what_arg) {}
};

/// Remote resource failure; status() is the HTTP status, or -1 when no
/// response was received (offline with a cold cache). CLI exit code 2.
class fetch_error : public std::runtime_error {
 public:
  explicit fetch_error(const std::string& what_arg, int status = -1)
      : std::runtime_error(what_arg), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// Input on which the statistic is undefined (e.g. zero overall variance).
/// CLI exit code 3.
class degenerate_input : public std::runtime_error {
 public:
  explicit degenerate_input(const std::string& what_arg)
      : std::runtime_error(what_arg) {}
};

/// Fit whose linear system stayed rank-deficient after the ridge fallback,
/// or whose neighborhood was too small to fit. CLI exit code 3.
class degenerate_fit : public std::runtime_error {
 public:
  explicit degenerate_fit(const std::string& what_arg)
      : std::runtime_error(what_arg) {}
};

}  // namespace cyclefind
