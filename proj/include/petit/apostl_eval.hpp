#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "petit/apostl_ast.hpp"
#include "petit/http_manager.hpp"
#include "petit/json_value.hpp"

namespace petit {

class EvalError : public std::runtime_error {
 public:
  explicit EvalError(const std::string& reason)
      : std::runtime_error(reason) {}
};

/// Result of a GET performed ahead of the operation under test for a
/// previous(...) term. A missing body is legitimate data (404 snapshots).
struct Snapshot {
  int code = 0;
  std::optional<JsonValue> body;
};

using SnapshotMap = std::map<std::string, Snapshot>;

/// Everything a formula needs to evaluate: where to send GETs, how `this`
/// resolves, and the pre-request snapshots for previous(...) terms.
struct EvalContext {
  std::string base_url;
  Transport* transport = nullptr;
  const JsonValue* this_request_body = nullptr;
  const HttpResponse* this_response = nullptr;
  const SnapshotMap* previous_results = nullptr;

  // quantifier binding, set while evaluating a quantified body
  const std::string* bound_variable = nullptr;
  const JsonValue* bound_element = nullptr;
};

/// The three value shapes comparisons see: numbers (lengths, literals),
/// response codes, and JSON bodies.
struct EvalValue {
  enum class Kind { Num, Json, Code };
  Kind kind = Kind::Num;
  std::variant<std::int64_t, double> num = std::int64_t{0};
  JsonValue json;
  int code = 0;

  static EvalValue from_int(std::int64_t v);
  static EvalValue from_json(JsonValue v);
  static EvalValue from_code(int c);

  /// Numeric reading when one exists (Num, Code, or a numeric Json).
  std::optional<double> numeric() const;
  bool is_exact_int() const;
  std::int64_t exact_int() const;
};

/// Evaluates a restriction-checked formula. Only GET requests are ever
/// issued; previous(...) terms come from ctx.previous_results and are never
/// re-executed. Throws EvalError for unresolved parameters, transport
/// failures, or type-mismatched comparisons.
bool evaluate(const apostl::Formula& f, const EvalContext& ctx);

bool evaluate(const apostl::BooleanExpr& e, const EvalContext& ctx);

bool evaluate_quantified(const apostl::QuantifiedFormula& f, const EvalContext& ctx);

EvalValue eval_term(const apostl::Term& t, const EvalContext& ctx);

bool compare_values(const EvalValue& lhs, apostl::Comparator cmp, const EvalValue& rhs);

/// Executes every previous(...) GET occurring in the given (already
/// substituted) formulas, each distinct reference once. Transport failures
/// are stored as code-0 snapshots without a body; evaluation then proceeds.
SnapshotMap snapshot_previous(const std::vector<apostl::Formula>& postconditions,
                              const EvalContext& ctx);

/// True when the formula contains a previous(...) term anywhere.
bool contains_previous(const apostl::Formula& f);

/// Builds the concrete URL path for a request whose placeholders are all
/// resolvable (literals, bound-variable accesses, or nested GETs).
std::string resolve_request_path(const apostl::HttpRequestExpr& req, const EvalContext& ctx);

}  // namespace petit
