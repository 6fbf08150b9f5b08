#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pcnsim {

// Bad user-supplied parameters or configuration. The CLI maps these to exit code 2.
class InvalidParameters : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input file. Carries the 1-based line number when known.
class ParseError : public InvalidParameters {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : InvalidParameters(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A state invariant was about to be broken. Always a bug, never user error.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pcnsim

#define PCNSIM_ENSURE(cond, msg)                                                      \
  do {                                                                                \
    if (!(cond)) throw ::pcnsim::InvariantViolation(std::string(__FILE__) + ":" +     \
                                                    std::to_string(__LINE__) + ": " + \
                                                    (msg));                           \
  } while (false)
