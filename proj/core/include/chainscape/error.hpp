#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chainscape {

// Bad user input: malformed specs, flags, out-of-range parameters.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what, std::size_t offset = npos)
      : std::runtime_error(what), offset_(offset) {}
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Expression parse failure; offset is a byte position in the source text.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t offset) : InputError(what, offset) {}
};

// Numerical evaluation failure (division by zero, non-finite value, ...).
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An analysis ran but could not establish what was asked of it.
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace chainscape
