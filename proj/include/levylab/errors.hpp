// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace levylab {

// Base class for everything thrown by the library.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Model or request outside the supported scope (sigma != 0, infinite nu, ...).
class OutOfScopeError : public Error {
  public:
    explicit OutOfScopeError(const std::string& what) : Error(what) {}
};

// DSL syntax error with 1-based line/column of the offending token.
class ParseError : public Error {
  public:
    ParseError(const std::string& what, int line, int column)
        : Error(what + " (line " + std::to_string(line) + ", column "
                + std::to_string(column) + ")"),
          line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

  private:
    int line_;
    int column_;
};

// Pathwise evaluation failure (division by zero, non-finite result).
class EvalError : public Error {
  public:
    explicit EvalError(const std::string& what) : Error(what) {}
};

// Config schema violation; carries the offending field path.
class ConfigError : public Error {
  public:
    ConfigError(const std::string& what, std::string field)
        : Error(what + " [field: " + field + "]"), field_(std::move(field)) {}

    const std::string& field() const { return field_; }

  private:
    std::string field_;
};

}  // namespace levylab
