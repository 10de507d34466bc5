#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace schemetree {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation failure: unassigned variable, unknown symbol, arity mismatch.
class EvalError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(std::string message, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct Violation {
  std::string node;  // empty for document-level problems
  std::string message;
};

/// A scheme document that parsed but breaks well-formedness rules.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations)
      : Error(summarize(violations)), violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  static std::string summarize(const std::vector<Violation>& vs) {
    std::string out;
    for (const auto& v : vs) {
      if (!out.empty()) out += "; ";
      if (!v.node.empty()) out += "node " + v.node + ": ";
      out += v.message;
    }
    return out;
  }

  std::vector<Violation> violations_;
};

}  // namespace schemetree
