#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ggt {

// Exit codes shared with the CLI: 0 ok, 2 parse/config, 3 budget, 4 coverage.
enum class ExitCode : int {
  ok = 0,
  parse = 2,
  budget = 3,
  coverage = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position = 0)
      : Error(ExitCode::parse, what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ExitCode::parse, what) {}
};

// Raised when a size budget is exhausted mid-computation; carries how far we got.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, std::size_t partial_size)
      : Error(ExitCode::budget, what + " (partial size " + std::to_string(partial_size) + ")"),
        partial_size_(partial_size) {}
  std::size_t partial_size() const { return partial_size_; }

 private:
  std::size_t partial_size_;
};

class CoverageError : public Error {
 public:
  explicit CoverageError(const std::string& what) : Error(ExitCode::coverage, what) {}
};

// Caps on enumeration and rewriting; defaults are desk-scale.
struct Budget {
  std::size_t max_letters = 1'000'000;    // longest word an automorphism may produce
  std::size_t max_elements = 5'000'000;   // most elements a ball/index may hold

  void check_letters(std::size_t n, const char* where) const {
    if (n > max_letters) throw BudgetError(std::string("letter budget exceeded in ") + where, n);
  }
  void check_elements(std::size_t n, const char* where) const {
    if (n > max_elements) throw BudgetError(std::string("element budget exceeded in ") + where, n);
  }
};

}  // namespace ggt
