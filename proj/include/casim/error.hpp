#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace casim {

// Bad user-supplied parameter or config (CLI exit code 2).
class invalid_parameter_error : public std::invalid_argument {
 public:
  explicit invalid_parameter_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Unparseable or internally inconsistent input log (CLI exit code 3).
// Carries the 1-based line number of the offending record when known.
class malformed_log_error : public std::runtime_error {
 public:
  malformed_log_error(const std::string& msg, std::size_t line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
  explicit malformed_log_error(const std::string& msg) : std::runtime_error(msg), line_(0) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Metric requested of an empty or degenerate sample (empty timeline,
// zero likes on a day, constant correlation series).
class undefined_metric_error : public std::runtime_error {
 public:
  explicit undefined_metric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace casim
