#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fairmon {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed specification text. Carries a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Expression outside the fragment an operation accepts (nested division,
/// non-PSE leaf where a PSE is required, ...).
class NormalFormError : public Error {
 public:
  using Error::Error;
};

/// Invalid or unsuitable Markov model (not stochastic, reducible, periodic).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input symbol not in the monitored alphabet.
class SymbolError : public Error {
 public:
  using Error::Error;
};

}  // namespace fairmon
