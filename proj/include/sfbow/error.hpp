#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfbow {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A line of an input file could not be parsed.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Structural problem with a file (header mismatch, bad magic, truncation).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Operands disagree on a dimension (vector length, universe width).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Recoverable conditions collected during an operation. Callers decide
/// whether to print them; they never affect results or exit status.
class Warnings {
 public:
  void add(std::string message) { messages_.push_back(std::move(message)); }
  const std::vector<std::string>& messages() const noexcept { return messages_; }
  std::size_t size() const noexcept { return messages_.size(); }
  bool empty() const noexcept { return messages_.empty(); }

 private:
  std::vector<std::string> messages_;
};

inline void warn(Warnings* sink, std::string message) {
  if (sink != nullptr) sink->add(std::move(message));
}

}  // namespace sfbow
