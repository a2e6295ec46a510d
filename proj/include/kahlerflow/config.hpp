// Run configuration for the command-line tool: one JSON document per run,
// precedence flags > file > defaults.

#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace kflow {

using Json = nlohmann::ordered_json;

inline constexpr const char* kConventionVersion = "kahlerflow-conventions-1";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Defaults for `identities`, `ode` or `lattice`. Throws ConfigError for an
/// unknown command.
Json default_config(const std::string& command);

/// Merges `overrides` into `base`, rejecting keys absent from `base`.
/// Nested objects merge recursively.
void merge_config(Json& base, const Json& overrides, const std::string& path = "");

/// Applies "key=value" or "a.b=value"; the value is parsed as JSON when
/// possible and taken as a string otherwise.
void apply_override(Json& config, const std::string& assignment);

/// Validates types and ranges for the command. Throws ConfigError.
void validate_config(const std::string& command, const Json& config);

/// Arithmetic expression in x1, y1, x2, y2 and pi with + - * / ^, unary
/// minus, parentheses and sin, cos, tan, exp, log, sqrt, abs.
class Expression {
 public:
  /// Throws ConfigError on a syntax error.
  explicit Expression(const std::string& text);
  ~Expression();
  Expression(Expression&&) noexcept;
  Expression& operator=(Expression&&) noexcept;

  double operator()(double x1, double y1, double x2, double y2) const;

  struct Node;

 private:
  std::unique_ptr<Node> root_;
};

}  // namespace kflow
