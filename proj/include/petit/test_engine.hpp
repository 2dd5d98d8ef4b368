#pragma once

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "petit/apostl_eval.hpp"
#include "petit/datagen.hpp"
#include "petit/http_manager.hpp"
#include "petit/json_value.hpp"
#include "petit/rng.hpp"
#include "petit/spec_model.hpp"

namespace petit {

enum class OrderStrategy { CMO, COM, MCO, MOC, OCM, OMC, RND };

/// Case-insensitive; exactly the seven valid spellings.
std::optional<OrderStrategy> parse_strategy(std::string_view text);
std::string to_string(OrderStrategy s);

/// Error text shown when the strategy argument is not one of the seven.
extern const char* const kInvalidStrategyMessage;

enum class Outcome { Ok, NotOk, FailedAsExpected, Inconclusive };

/// The four-way outcome table: a 200 with everything satisfied is OK, a 200
/// with any dissatisfied condition is NOT OK, a failure the preconditions
/// predicted is failed-as-expected, and an unexplained failure needs its
/// execution trace analysed.
Outcome classify(bool code_200, bool satisfies_pre, bool satisfies_post_and_prev);

/// Failed-as-expected operations count as OK in summaries.
bool counts_as_ok(Outcome o);

class EngineError : public std::runtime_error {
 public:
  explicit EngineError(const std::string& message) : std::runtime_error(message) {}
};

/// Generated resources keyed by schema name, recycled across operation
/// tests. Objects are added on POST and only leave through effect reversal.
class ObjectPool {
 public:
  /// Appends and returns a stable index within the schema's list.
  std::size_t add(const std::string& schema, JsonValue object);

  const JsonValue* recycle(const std::string& schema) const;  // oldest entry

  JsonValue* entry(const std::string& schema, std::size_t index);

  const std::vector<JsonValue>* entries(const std::string& schema) const;

  /// Oldest pooled object of the schema whose id_property is `id_name`.
  const JsonValue* find_by_id_name(const ApiSpec& spec, std::string_view id_name) const;

  const std::map<std::string, std::vector<JsonValue>>& all() const { return entries_; }

 private:
  std::map<std::string, std::vector<JsonValue>> entries_;
};

struct StepRecord {
  std::string label;
  bool ok = true;
  std::vector<std::string> failures;
};

struct OperationVerdict {
  std::string name;           // e.g. "DELETE /players/{playerNIF}"
  std::string concrete_path;  // after parameter replacement
  Outcome outcome = Outcome::Ok;
  bool code_200 = false;
  bool satisfies_pre = true;
  bool satisfies_post = true;
  bool satisfies_prev = true;
  std::optional<int> response_code;  // absent on transport failure
  std::string response_message;
  std::vector<StepRecord> steps;
};

struct ApiResult {
  std::string api;
  int ok = 0;
  int not_ok = 0;
  int inconclusive = 0;
  std::vector<OperationVerdict> verdicts;
};

struct EngineOptions {
  OrderStrategy strategy = OrderStrategy::COM;
  bool randomize_apis = false;
  std::uint64_t seed = 1;
  bool verbose = false;
  int max_resources = 0;
  bool stable_order = false;
};

/// Category-ordered permutation of the operations: strategy letters fix the
/// category order, RND shuffles everything. Within a category the order is a
/// seeded shuffle, or document order when `stable` is set.
std::vector<const OperationSpec*> reorganize(std::vector<const OperationSpec*> ops,
                                             OrderStrategy strategy, Rng& rng, bool stable);

struct ReplaceResult {
  std::string concrete_path;
  std::vector<apostl::Formula> preconditions;
  std::vector<apostl::Formula> postconditions;
  JsonValue generated_url_params;  // object: name -> generated value
};

/// Substitutes every simple {param} placeholder in the operation URL and in
/// all condition formulas. The placeholder naming the body schema's ID
/// property resolves to the operation's own request data first, then pooled
/// objects, then a fresh value. Dotted placeholders stay put for quantifier
/// evaluation.
ReplaceResult replace_parameters(const OperationSpec& op, const ApiSpec& spec,
                                 const ObjectPool& pool, Rng& rng,
                                 const JsonValue* request_data = nullptr);

/// Orchestrates the whole testing process against one service, writing the
/// report to `out` as it goes.
class TestEngine {
 public:
  TestEngine(const ApiSpec& spec, Transport& transport, EngineOptions options,
             std::ostream& out = std::cout);

  std::vector<ApiResult> run();

  ApiResult test_api(const ApiGroup& api);

  const ObjectPool& pool() const { return pool_; }

 private:
  StepRecord check_invariants(const ApiGroup& api);
  OperationVerdict test_operation(const OperationSpec& op, StepRecord invariant_step);
  void delete_effects();

  void print_step(const StepRecord& step);
  void print_request_line(const OperationVerdict& v);
  void print_operation_result(const OperationVerdict& v);
  void print_api_summary(const ApiResult& r);

  const ApiSpec& spec_;
  Transport& transport_;
  EngineOptions options_;
  std::ostream& out_;
  Rng rng_;
  ObjectPool pool_;
};

/// 0 when no operation anywhere is NOT OK, 1 otherwise.
int exit_status(const std::vector<ApiResult>& results);

}  // namespace petit
