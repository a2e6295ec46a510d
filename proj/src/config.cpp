#include "kahlerflow/config.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <numbers>

namespace kflow {

Json default_config(const std::string& command) {
  if (command == "identities") {
    return Json{{"seed", 1},
                {"samples", 1000},
                {"ricci_samples", 10000},
                {"equivariance_samples", 100},
                {"mu_min", -2.0},
                {"mu_max", 2.0},
                {"scale", 1.0},
                {"tolerances",
                 {{"cancellation", 1e-12},
                  {"trace_compatibility", 1e-12},
                  {"scalar_compatibility", 1e-12},
                  {"system_s_equivalence", 1e-11},
                  {"kahler_einstein_stationarity", 1e-13},
                  {"sharp_oracle", 1e-12},
                  {"sharp_equivariance", 1e-10},
                  {"structure_constants", 1e-14},
                  {"round_trip", 1e-12},
                  {"trace_identity", 1e-12},
                  {"ricci_claim", 1e-10},
                  {"boundary_identity", 1e-12},
                  {"eigen_sum_boundary", 1e-12}}},
                {"output_dir", "kahlerflow-out"}};
  }
  if (command == "ode") {
    return Json{{"seed", 42},
                {"count", 100},
                {"horizon", 1.0},
                {"dt", 1e-3},
                {"mu_min", -2.0},
                {"mu_max", 2.0},
                {"scale", 1.0},
                {"blowup_threshold", 1e6},
                {"tolerances", {{"excursion", 1e-7}, {"touch_window", 1e-6}, {"touch_rhs", 1e-9}}},
                {"initial", nullptr},
                {"output_dir", "kahlerflow-out"}};
  }
  if (command == "lattice") {
    return Json{{"seed", 0},
                {"grid_n", 16},
                {"potential", "cos_x1"},
                {"epsilon", 0.05},
                {"expression", ""},
                {"steps", 100},
                {"dt_factor", 0.1},
                {"mu", 0.0},
                {"snapshot_every", 0},
                {"tolerances", {{"stability_factor_max", 1.0}}},
                {"output_dir", "kahlerflow-out"}};
  }
  throw ConfigError("unknown command '" + command + "'");
}

void merge_config(Json& base, const Json& overrides, const std::string& path) {
  if (!overrides.is_object()) throw ConfigError("configuration" + (path.empty() ? "" : " at " + path) + " must be an object");
  for (const auto& [key, value] : overrides.items()) {
    const std::string full = path.empty() ? key : path + "." + key;
    if (!base.contains(key)) throw ConfigError("unknown configuration key '" + full + "'");
    Json& slot = base[key];
    if (slot.is_object() && value.is_object()) {
      merge_config(slot, value, full);
    } else {
      slot = value;
    }
  }
}

void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    value = text;
  }
  // Build {"a": {"b": value}} for dotted keys.
  Json patch = value;
  std::string remaining = key;
  std::vector<std::string> parts;
  for (std::size_t pos; (pos = remaining.find('.')) != std::string::npos;) {
    parts.push_back(remaining.substr(0, pos));
    remaining = remaining.substr(pos + 1);
  }
  parts.push_back(remaining);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = Json{{*it, patch}};
  merge_config(config, patch);
}

namespace {

double number(const Json& cfg, const std::string& key, const std::string& scope = "") {
  const Json& v = cfg.at(key);
  if (!v.is_number()) throw ConfigError("'" + scope + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("'" + scope + key + "' must be finite");
  return x;
}

long integer(const Json& cfg, const std::string& key) {
  const Json& v = cfg.at(key);
  if (!v.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  return v.get<long>();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void check_tolerances(const Json& cfg) {
  for (const auto& [key, value] : cfg.at("tolerances").items()) {
    require(value.is_number(), "'tolerances." + key + "' must be a number");
    require(value.get<double>() >= 0.0, "'tolerances." + key + "' must be >= 0");
  }
}

void check_output(const Json& cfg) {
  require(cfg.at("output_dir").is_string() && !cfg.at("output_dir").get<std::string>().empty(),
          "'output_dir' must be a non-empty string");
}

}  // namespace

void validate_config(const std::string& command, const Json& cfg) {
  check_output(cfg);
  check_tolerances(cfg);
  if (command == "identities") {
    require(integer(cfg, "seed") >= 0, "'seed' must be >= 0");
    require(integer(cfg, "samples") >= 1, "'samples' must be >= 1");
    require(integer(cfg, "ricci_samples") >= 1, "'ricci_samples' must be >= 1");
    require(integer(cfg, "equivariance_samples") >= 1, "'equivariance_samples' must be >= 1");
    require(number(cfg, "mu_min") <= number(cfg, "mu_max"), "'mu_min' must be <= 'mu_max'");
    require(number(cfg, "scale") > 0.0, "'scale' must be > 0");
  } else if (command == "ode") {
    require(integer(cfg, "seed") >= 0, "'seed' must be >= 0");
    require(integer(cfg, "count") >= 1, "'count' must be >= 1");
    require(number(cfg, "horizon") > 0.0, "'horizon' must be > 0");
    require(number(cfg, "dt") > 0.0, "'dt' must be > 0");
    require(number(cfg, "mu_min") <= number(cfg, "mu_max"), "'mu_min' must be <= 'mu_max'");
    require(number(cfg, "scale") > 0.0, "'scale' must be > 0");
    require(number(cfg, "blowup_threshold") > 0.0, "'blowup_threshold' must be > 0");
    const Json& init = cfg.at("initial");
    if (!init.is_null()) {
      require(init.is_object(), "'initial' must be null or an object {R, s, M, mu}");
      for (const auto& [key, value] : init.items()) {
        require(key == "R" || key == "s" || key == "M" || key == "mu", "unknown key 'initial." + key + "'");
        (void)value;
      }
      require(init.contains("R") && init.at("R").is_number(), "'initial.R' must be a number");
      require(init.contains("mu") && init.at("mu").is_number(), "'initial.mu' must be a number");
      require(init.contains("s") && init.at("s").is_array() && init.at("s").size() == 3,
              "'initial.s' must be an array of 3 numbers");
      require(init.contains("M") && init.at("M").is_array() && init.at("M").size() == 3,
              "'initial.M' must be a 3x3 array");
      for (const auto& row : init.at("M")) require(row.is_array() && row.size() == 3, "'initial.M' must be a 3x3 array");
    }
  } else if (command == "lattice") {
    const long n = integer(cfg, "grid_n");
    require(n >= 8 && n % 2 == 0 && n <= 64, "'grid_n' must be even and in [8, 64]");
    const Json& pot = cfg.at("potential");
    require(pot.is_string(), "'potential' must be a string");
    const std::string kind = pot.get<std::string>();
    require(kind == "zero" || kind == "cos_x1" || kind == "cos_sum" || kind == "custom",
            "'potential' must be one of zero, cos_x1, cos_sum, custom");
    number(cfg, "epsilon");
    require(cfg.at("expression").is_string(), "'expression' must be a string");
    if (kind == "custom") {
      require(!cfg.at("expression").get<std::string>().empty(), "'expression' is required for potential=custom");
      Expression check(cfg.at("expression").get<std::string>());
    }
    require(integer(cfg, "steps") >= 0, "'steps' must be >= 0");
    require(integer(cfg, "seed") >= 0, "'seed' must be >= 0");
    require(number(cfg, "dt_factor") > 0.0, "'dt_factor' must be > 0");
    require(number(cfg, "dt_factor") <= number(cfg.at("tolerances"), "stability_factor_max", "tolerances."),
            "'dt_factor' exceeds 'tolerances.stability_factor_max'");
    number(cfg, "mu");
    require(integer(cfg, "snapshot_every") >= 0, "'snapshot_every' must be >= 0");
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
}

// ---------------------------------------------------------------------------
// Expression

struct Expression::Node {
  enum class Kind { constant, variable, unary_minus, binary, call } kind;
  double value = 0.0;
  int variable = 0;
  char op = 0;
  std::function<double(double)> fn;
  std::unique_ptr<Node> left, right;

  double eval(const double* vars) const {
    switch (kind) {
      case Kind::constant:
        return value;
      case Kind::variable:
        return vars[variable];
      case Kind::unary_minus:
        return -left->eval(vars);
      case Kind::call:
        return fn(left->eval(vars));
      case Kind::binary: {
        const double a = left->eval(vars), b = right->eval(vars);
        switch (op) {
          case '+': return a + b;
          case '-': return a - b;
          case '*': return a * b;
          case '/': return a / b;
          default: return std::pow(a, b);
        }
      }
    }
    return 0.0;
  }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::unique_ptr<Node>;

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr parse() {
    NodePtr n = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression error at position " + std::to_string(pos_) + ": " + what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr binary(char op, NodePtr a, NodePtr b) {
    auto n = std::make_unique<Node>();
    n->kind = Node::Kind::binary;
    n->op = op;
    n->left = std::move(a);
    n->right = std::move(b);
    return n;
  }

  NodePtr sum() {
    NodePtr n = product();
    for (;;) {
      if (accept('+')) n = binary('+', std::move(n), product());
      else if (accept('-')) n = binary('-', std::move(n), product());
      else return n;
    }
  }

  NodePtr product() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = binary('*', std::move(n), unary());
      else if (accept('/')) n = binary('/', std::move(n), unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::unary_minus;
      n->left = unary();
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) return binary('^', std::move(base), unary());
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (accept('(')) {
      NodePtr n = sum();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::constant;
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      static const char* vars[] = {"x1", "y1", "x2", "y2"};
      for (int i = 0; i < 4; ++i)
        if (name == vars[i]) {
          auto n = std::make_unique<Node>();
          n->kind = Node::Kind::variable;
          n->variable = i;
          return n;
        }
      if (name == "pi") {
        auto n = std::make_unique<Node>();
        n->kind = Node::Kind::constant;
        n->value = std::numbers::pi;
        return n;
      }
      std::function<double(double)> fn;
      if (name == "sin") fn = [](double x) { return std::sin(x); };
      else if (name == "cos") fn = [](double x) { return std::cos(x); };
      else if (name == "tan") fn = [](double x) { return std::tan(x); };
      else if (name == "exp") fn = [](double x) { return std::exp(x); };
      else if (name == "log") fn = [](double x) { return std::log(x); };
      else if (name == "sqrt") fn = [](double x) { return std::sqrt(x); };
      else if (name == "abs") fn = [](double x) { return std::abs(x); };
      else fail("unknown identifier '" + name + "'");
      if (!accept('(')) fail("expected '(' after " + name);
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::call;
      n->fn = std::move(fn);
      n->left = sum();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(const std::string& text) : root_(Parser(text).parse()) {}
Expression::~Expression() = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;

double Expression::operator()(double x1, double y1, double x2, double y2) const {
  const double vars[4] = {x1, y1, x2, y2};
  return root_->eval(vars);
}

}  // namespace kflow
