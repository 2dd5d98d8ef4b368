#include "petit/test_engine.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "petit/apostl_parser.hpp"

namespace petit {

using namespace apostl;

const char* const kInvalidStrategyMessage =
    "Invalid operation order strategy.\n"
    "A valid strategy is composed of three characters meaning the following:\n"
    "  > C: constructors (POST)\n"
    "  > M: Mutators (PUT, DELETE)\n"
    "  > O: Observers (GET)\n"
    "  > RND (random)\n"
    "A valid strategy would be, e.g., CMO\n";

std::optional<OrderStrategy> parse_strategy(std::string_view text) {
  std::string upper;
  for (char c : text) upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (upper == "CMO") return OrderStrategy::CMO;
  if (upper == "COM") return OrderStrategy::COM;
  if (upper == "MCO") return OrderStrategy::MCO;
  if (upper == "MOC") return OrderStrategy::MOC;
  if (upper == "OCM") return OrderStrategy::OCM;
  if (upper == "OMC") return OrderStrategy::OMC;
  if (upper == "RND") return OrderStrategy::RND;
  return std::nullopt;
}

std::string to_string(OrderStrategy s) {
  switch (s) {
    case OrderStrategy::CMO: return "CMO";
    case OrderStrategy::COM: return "COM";
    case OrderStrategy::MCO: return "MCO";
    case OrderStrategy::MOC: return "MOC";
    case OrderStrategy::OCM: return "OCM";
    case OrderStrategy::OMC: return "OMC";
    case OrderStrategy::RND: return "RND";
  }
  return "COM";
}

Outcome classify(bool code_200, bool satisfies_pre, bool satisfies_post_and_prev) {
  if (code_200) {
    if (satisfies_pre && satisfies_post_and_prev) return Outcome::Ok;
    return Outcome::NotOk;
  }
  return satisfies_pre ? Outcome::Inconclusive : Outcome::FailedAsExpected;
}

bool counts_as_ok(Outcome o) { return o == Outcome::Ok || o == Outcome::FailedAsExpected; }

std::size_t ObjectPool::add(const std::string& schema, JsonValue object) {
  auto& list = entries_[schema];
  list.push_back(std::move(object));
  return list.size() - 1;
}

const JsonValue* ObjectPool::recycle(const std::string& schema) const {
  auto it = entries_.find(schema);
  if (it == entries_.end() || it->second.empty()) return nullptr;
  return &it->second.front();
}

JsonValue* ObjectPool::entry(const std::string& schema, std::size_t index) {
  auto it = entries_.find(schema);
  if (it == entries_.end() || index >= it->second.size()) return nullptr;
  return &it->second[index];
}

const std::vector<JsonValue>* ObjectPool::entries(const std::string& schema) const {
  auto it = entries_.find(schema);
  return it == entries_.end() ? nullptr : &it->second;
}

const JsonValue* ObjectPool::find_by_id_name(const ApiSpec& spec, std::string_view id_name) const {
  const SchemaDef* schema = spec.schema_for_id(id_name);
  if (schema == nullptr) return nullptr;
  const JsonValue* oldest = recycle(schema->name);
  if (oldest == nullptr) return nullptr;
  const JsonValue* id = oldest->find(schema->id_property);
  if (id == nullptr || id->is_generated()) return nullptr;
  return oldest;
}

std::vector<const OperationSpec*> reorganize(std::vector<const OperationSpec*> ops,
                                             OrderStrategy strategy, Rng& rng, bool stable) {
  if (strategy == OrderStrategy::RND) {
    if (!stable) rng.shuffle(ops);
    return ops;
  }
  std::vector<const OperationSpec*> constructors;
  std::vector<const OperationSpec*> mutators;
  std::vector<const OperationSpec*> observers;
  for (const OperationSpec* op : ops) {
    switch (op->category) {
      case OpCategory::Constructor: constructors.push_back(op); break;
      case OpCategory::Mutator: mutators.push_back(op); break;
      case OpCategory::Observer: observers.push_back(op); break;
    }
  }
  if (!stable) {
    rng.shuffle(constructors);
    rng.shuffle(mutators);
    rng.shuffle(observers);
  }
  const std::string order = to_string(strategy);
  std::vector<const OperationSpec*> out;
  out.reserve(ops.size());
  for (char c : order) {
    const auto& bucket = c == 'C' ? constructors : c == 'M' ? mutators : observers;
    out.insert(out.end(), bucket.begin(), bucket.end());
  }
  return out;
}

namespace {

std::string scalar_text(const JsonValue& v) {
  if (v.is_string()) return v.as_string();
  if (v.is_int()) return std::to_string(v.as_int());
  if (v.is_real()) return std::to_string(v.as_real());
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  return to_wire(v);
}

/// Memoizing placeholder resolver: the operation's own request data first
/// (its body identifies the resource under test), pooled objects next,
/// generation on miss.
class ParamResolver {
 public:
  ParamResolver(const OperationSpec& op, const ApiSpec& spec, const ObjectPool& pool, Rng& rng,
                const JsonValue* request_data)
      : op_(op), spec_(spec), pool_(pool), rng_(rng), request_data_(request_data) {}

  std::string resolve(const std::string& name) {
    if (auto it = cache_.find(name); it != cache_.end()) return it->second;
    std::string value;
    if (const JsonValue* own = own_body_id(name)) {
      value = scalar_text(*own);
    } else if (const JsonValue* pooled = pool_.find_by_id_name(spec_, name)) {
      const SchemaDef* schema = spec_.schema_for_id(name);
      value = scalar_text(*pooled->find(schema->id_property));
    } else {
      value = scalar_text(generate_value(name));
      generated_.set(name, JsonValue::str(value));
    }
    cache_.emplace(name, value);
    return value;
  }

  JsonValue generated() const { return generated_; }

 private:
  const JsonValue* own_body_id(const std::string& name) {
    if (request_data_ == nullptr || !op_.body_schema) return nullptr;
    const SchemaDef* schema = spec_.find_schema(*op_.body_schema);
    if (schema == nullptr || schema->id_property != name) return nullptr;
    const JsonValue* member = request_data_->find(name);
    if (member == nullptr || member->is_generated()) return nullptr;
    return member;
  }

  JsonValue generate_value(const std::string& name) {
    if (const ParamSpec* param = op_.find_parameter(name)) {
      return generate_url_param(*param, rng_);
    }
    // condition-only placeholder: fall back to the owning schema's property
    if (const SchemaDef* schema = spec_.schema_for_id(name)) {
      if (const PropertySpec* prop = schema->find_property(name)) {
        ParamSpec synthetic;
        synthetic.name = name;
        synthetic.kind =
            prop->kind == PropertyKind::Integer ? ParamKind::Integer : ParamKind::String;
        synthetic.regex = prop->regex;
        synthetic.minimum = prop->minimum;
        return generate_url_param(synthetic, rng_);
      }
    }
    throw EngineError("unknown parameter '" + name + "': no pooled object, operation parameter, "
                      "or schema ID property matches it");
  }

  const OperationSpec& op_;
  const ApiSpec& spec_;
  const ObjectPool& pool_;
  Rng& rng_;
  const JsonValue* request_data_;
  std::map<std::string, std::string> cache_;
  JsonValue generated_ = JsonValue::object();
};

HttpRequestExpr substitute_request(const HttpRequestExpr& req, ParamResolver& resolver,
                                   const std::string& skip_variable);

void substitute_block_parameter(BlockParameter& p, ParamResolver& resolver,
                                const std::string& skip_variable);

UrlBlock substitute_block(const UrlBlock& block, ParamResolver& resolver,
                          const std::string& skip_variable) {
  if (block.is_literal()) return block;
  UrlBlock out = block;
  BlockParameter p = block.parameter();
  if (p.kind == BlockParameter::Kind::Name) {
    if (p.path.size() == 1 && p.path[0] != skip_variable) {
      out.value = resolver.resolve(p.path[0]);
      return out;
    }
    return out;  // quantifier-variable access, resolved per element later
  }
  substitute_block_parameter(p, resolver, skip_variable);
  out.value = std::move(p);
  return out;
}

void substitute_block_parameter(BlockParameter& p, ParamResolver& resolver,
                                const std::string& skip_variable) {
  if (p.operation && p.operation->request) {
    auto patched = std::make_shared<OperationRef>(*p.operation);
    patched->request = substitute_request(*patched->request, resolver, skip_variable);
    p.operation = std::move(patched);
  }
}

HttpRequestExpr substitute_request(const HttpRequestExpr& req, ParamResolver& resolver,
                                   const std::string& skip_variable) {
  HttpRequestExpr out = req;
  for (auto& segment : out.segments) {
    for (auto& block : segment) {
      block = substitute_block(block, resolver, skip_variable);
    }
  }
  return out;
}

Term substitute_term(const Term& t, ParamResolver& resolver, const std::string& skip_variable) {
  Term out = t;
  if ((t.kind == Term::Kind::Operation || t.kind == Term::Kind::Previous) &&
      t.operation.request) {
    out.operation.request = substitute_request(*t.operation.request, resolver, skip_variable);
  }
  return out;
}

BooleanExpr substitute_boolean(const BooleanExpr& e, ParamResolver& resolver,
                               const std::string& skip_variable) {
  switch (e.kind) {
    case BooleanExpr::Kind::Binary:
      return BooleanExpr::binary(e.op, substitute_boolean(*e.lhs, resolver, skip_variable),
                                 substitute_boolean(*e.rhs, resolver, skip_variable));
    case BooleanExpr::Kind::Compare: {
      Comparison c;
      c.lhs = substitute_term(e.comparison->lhs, resolver, skip_variable);
      c.cmp = e.comparison->cmp;
      c.rhs = substitute_term(e.comparison->rhs, resolver, skip_variable);
      return BooleanExpr::compare(std::move(c));
    }
    default:
      return e;
  }
}

Formula substitute_formula(const Formula& f, ParamResolver& resolver) {
  Formula out;
  if (f.is_quantified()) {
    QuantifiedFormula q = f.quantified();
    q.collection = substitute_term(q.collection, resolver, q.variable);
    q.body = substitute_boolean(q.body, resolver, q.variable);
    out.value = std::move(q);
  } else {
    out.value = substitute_boolean(f.boolean(), resolver, "");
  }
  return out;
}

std::string api_title(const std::string& group_name) {
  std::string name = group_name;
  if (!name.empty()) name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
  if (name.size() > 1 && name.back() == 's') name.pop_back();
  return name + "'s API";
}

constexpr int kLabelWidth = 46;
constexpr const char* kRule =
    "--------------------------------------------------------------------------";

std::string padded(const std::string& label) {
  std::string out = label;
  if (out.size() < kLabelWidth) {
    out.append(kLabelWidth - out.size(), ' ');
  } else {
    out.push_back(' ');
  }
  return out + ":  ";
}

}  // namespace

ReplaceResult replace_parameters(const OperationSpec& op, const ApiSpec& spec,
                                 const ObjectPool& pool, Rng& rng,
                                 const JsonValue* request_data) {
  ParamResolver resolver(op, spec, pool, rng, request_data);
  ReplaceResult out;
  for (const auto& seg : op.path_template) {
    out.concrete_path += "/";
    out.concrete_path += seg.is_param ? resolver.resolve(seg.text) : seg.text;
  }
  for (const auto& f : op.preconditions) {
    out.preconditions.push_back(substitute_formula(f, resolver));
  }
  for (const auto& f : op.postconditions) {
    out.postconditions.push_back(substitute_formula(f, resolver));
  }
  out.generated_url_params = resolver.generated();
  return out;
}

TestEngine::TestEngine(const ApiSpec& spec, Transport& transport, EngineOptions options,
                       std::ostream& out)
    : spec_(spec), transport_(transport), options_(options), out_(out), rng_(options.seed) {}

std::vector<ApiResult> TestEngine::run() {
  std::vector<const ApiGroup*> apis;
  for (const auto& api : spec_.apis) apis.push_back(&api);
  if (options_.randomize_apis) rng_.shuffle(apis);

  std::vector<ApiResult> results;
  for (const ApiGroup* api : apis) {
    results.push_back(test_api(*api));
    print_api_summary(results.back());
  }
  delete_effects();
  return results;
}

ApiResult TestEngine::test_api(const ApiGroup& api) {
  ApiResult result;
  result.api = api.name;
  std::vector<const OperationSpec*> ops;
  for (const auto& op : api.operations) ops.push_back(&op);
  ops = reorganize(std::move(ops), options_.strategy, rng_, options_.stable_order);

  for (const OperationSpec* op : ops) {
    StepRecord invariants = check_invariants(api);
    OperationVerdict verdict = test_operation(*op, std::move(invariants));
    switch (verdict.outcome) {
      case Outcome::Ok:
      case Outcome::FailedAsExpected: result.ok++; break;
      case Outcome::NotOk: result.not_ok++; break;
      case Outcome::Inconclusive: result.inconclusive++; break;
    }
    result.verdicts.push_back(std::move(verdict));
  }
  return result;
}

StepRecord TestEngine::check_invariants(const ApiGroup& api) {
  StepRecord step;
  step.label = "Verifying Invariants";
  EvalContext ctx;
  ctx.base_url = spec_.base_url;
  ctx.transport = &transport_;
  for (const auto& inv : api.invariants) {
    try {
      if (!evaluate(inv, ctx)) {
        step.ok = false;
        step.failures.push_back(pretty_print(inv));
      }
    } catch (const std::exception& e) {
      step.ok = false;
      step.failures.push_back(pretty_print(inv) + "  (" + e.what() + ")");
    }
  }
  return step;
}

OperationVerdict TestEngine::test_operation(const OperationSpec& op, StepRecord invariant_step) {
  OperationVerdict v;
  v.name = op.display_name();
  out_ << ">> " << v.name << "\n";
  print_step(invariant_step);
  v.steps.push_back(std::move(invariant_step));

  // data: constructors always generate fresh data and pool it; everything
  // else recycles when the pool has a matching object
  const bool is_post = op.method == HttpMethod::Post;
  JsonValue data;
  std::optional<std::pair<std::string, std::size_t>> pooled_at;
  std::string recycle_schema;
  if (op.method == HttpMethod::Post || op.method == HttpMethod::Put) {
    recycle_schema = op.body_schema.value_or("");
  } else {
    for (const auto& seg : op.path_template) {
      if (!seg.is_param) continue;
      if (const SchemaDef* schema = spec_.schema_for_id(seg.text)) recycle_schema = schema->name;
    }
  }
  if (is_post) {
    data = generate(op, spec_, rng_);
    if (op.body_schema) {
      pooled_at = {*op.body_schema, pool_.add(*op.body_schema, data)};
    }
  } else {
    const JsonValue* recycled = recycle_schema.empty() ? nullptr : pool_.recycle(recycle_schema);
    data = recycled != nullptr ? *recycled : generate(op, spec_, rng_);
  }
  StepRecord data_step;
  data_step.label = is_post ? "Generating Data" : "Recycling Data";
  print_step(data_step);
  v.steps.push_back(std::move(data_step));

  const bool sends_body = op.method == HttpMethod::Post || op.method == HttpMethod::Put;
  ReplaceResult replaced = replace_parameters(op, spec_, pool_, rng_, sends_body ? &data : nullptr);
  v.concrete_path = replaced.concrete_path;

  EvalContext ctx;
  ctx.base_url = spec_.base_url;
  ctx.transport = &transport_;
  ctx.this_request_body = &data;

  // preconditions: failures are shown and the request still goes out
  StepRecord pre_step;
  pre_step.label = "Verifying Preconditions";
  for (const auto& f : replaced.preconditions) {
    try {
      if (!evaluate(f, ctx)) pre_step.failures.push_back(pretty_print(f));
    } catch (const std::exception& e) {
      pre_step.failures.push_back(pretty_print(f) + "  (" + e.what() + ")");
    }
  }
  pre_step.ok = pre_step.failures.empty();
  v.satisfies_pre = pre_step.ok;
  print_step(pre_step);
  v.steps.push_back(std::move(pre_step));

  // previous(...) snapshots go out before the operation's own request
  const SnapshotMap snapshots = snapshot_previous(replaced.postconditions, ctx);

  HttpResponse response;
  bool transport_ok = true;
  std::string transport_reason;
  try {
    response = transport_.send(op.method, spec_.base_url + replaced.concrete_path,
                               sends_body ? std::optional<JsonValue>(data) : std::nullopt);
    v.response_code = response.code;
    if (response.message) v.response_message = *response.message;
  } catch (const TransportError& e) {
    transport_ok = false;
    transport_reason = e.what();
    v.response_message = transport_reason;
  }
  v.code_200 = transport_ok && response.code == 200;

  // a constructor's pooled copy gets the server-assigned values so later
  // tests can address the resource
  if (is_post && v.code_200 && pooled_at && response.body && response.body->is_object()) {
    if (JsonValue* pooled = pool_.entry(pooled_at->first, pooled_at->second)) {
      for (auto& [key, value] : pooled->as_object()) {
        if (!value.is_generated()) continue;
        if (const JsonValue* assigned = response.body->find(key)) value = *assigned;
      }
    }
  }

  print_request_line(v);
  if (options_.verbose && transport_ok) {
    out_ << "  > Response\n";
    std::string shown = response.body ? to_display(*response.body, options_.max_resources)
                        : response.raw_text.empty() ? "<empty>"
                                                    : response.raw_text;
    for (std::size_t at = shown.find('\n'); at != std::string::npos;
         at = shown.find('\n', at + 3)) {
      shown.insert(at + 1, "  ");
    }
    out_ << "  " << shown << "\n";
  }
  if (!v.code_200) {
    out_ << "    > Caused by:\n";
    out_ << "      > Code: " << (v.response_code ? std::to_string(*v.response_code) : "none")
         << "\n";
    out_ << "      > Message: "
         << (v.response_message.empty() ? "(no message)" : v.response_message) << "\n";
  } else {
    ctx.this_response = &response;
    ctx.previous_results = &snapshots;
    StepRecord post_step;
    post_step.label = "Verifying Postconditions";
    for (const auto& f : replaced.postconditions) {
      const bool with_previous = contains_previous(f);
      bool holds = false;
      std::string note;
      try {
        holds = evaluate(f, ctx);
      } catch (const std::exception& e) {
        holds = false;
        note = "  (" + std::string(e.what()) + ")";
      }
      if (!holds) {
        post_step.failures.push_back(pretty_print(f) + note);
        (with_previous ? v.satisfies_prev : v.satisfies_post) = false;
      }
    }
    post_step.ok = post_step.failures.empty();
    print_step(post_step);
    v.steps.push_back(std::move(post_step));
  }

  v.outcome = classify(v.code_200, v.satisfies_pre, v.satisfies_post && v.satisfies_prev);
  print_operation_result(v);
  return v;
}

void TestEngine::delete_effects() {
  for (const auto& api : spec_.apis) {
    for (const auto& op : api.operations) {
      if (op.method != HttpMethod::Delete) continue;
      // the deepest placeholder names the resource the operation deletes
      std::string target_param;
      for (const auto& seg : op.path_template) {
        if (seg.is_param) target_param = seg.text;
      }
      const SchemaDef* schema = target_param.empty() ? nullptr : spec_.schema_for_id(target_param);
      if (schema == nullptr) continue;
      const std::vector<JsonValue>* pooled = pool_.entries(schema->name);
      if (pooled == nullptr) continue;
      for (const JsonValue& object : *pooled) {
        const JsonValue* id = object.find(schema->id_property);
        if (id == nullptr || id->is_generated()) continue;
        std::string path;
        bool resolvable = true;
        for (const auto& seg : op.path_template) {
          path += "/";
          if (!seg.is_param) {
            path += seg.text;
          } else if (seg.text == target_param) {
            path += scalar_text(*id);
          } else if (const JsonValue* other = pool_.find_by_id_name(spec_, seg.text)) {
            path += scalar_text(*other->find(spec_.schema_for_id(seg.text)->id_property));
          } else {
            resolvable = false;
            break;
          }
        }
        if (!resolvable) continue;
        try {
          transport_.send(HttpMethod::Delete, spec_.base_url + path, std::nullopt);
        } catch (const TransportError&) {
          // reversal is best-effort; carry on with the remaining objects
        }
      }
    }
  }
  out_ << ">>> " << padded("REVERTING ALL EFFECTS") << "OK\n";
}

void TestEngine::print_step(const StepRecord& step) {
  out_ << "  > " << padded(step.label) << (step.ok ? "OK" : "NOT OK") << "\n";
  if (!step.failures.empty()) {
    out_ << "    > Failed:\n";
    for (const auto& f : step.failures) out_ << "      - " << f << "\n";
  }
}

void TestEngine::print_request_line(const OperationVerdict& v) {
  std::string label;
  if (v.code_200) {
    label = "OK";
  } else if (!v.satisfies_pre) {
    label = "FAILED (as expected)";
  } else {
    label = "FAILED (analyse exec. trace)";
  }
  out_ << "  > " << padded("Performing Request") << label << "\n";
}

void TestEngine::print_operation_result(const OperationVerdict& v) {
  std::string label;
  switch (v.outcome) {
    case Outcome::Ok:
    case Outcome::FailedAsExpected: label = "OK"; break;
    case Outcome::NotOk: label = "NOT OK"; break;
    case Outcome::Inconclusive: label = "INCONCLUSIVE"; break;
  }
  out_ << "  " << kRule << "\n";
  out_ << "  " << padded(v.name) << label << "\n\n";
}

void TestEngine::print_api_summary(const ApiResult& r) {
  out_ << ">>> " << api_title(r.api) << " Results:\n";
  out_ << "    " << padded("OK") << r.ok << "\n";
  out_ << "    " << padded("NOT OK") << r.not_ok << "\n";
  out_ << "    " << padded("INCONCLUSIVE") << r.inconclusive << "\n";
  out_ << kRule << "\n";
}

int exit_status(const std::vector<ApiResult>& results) {
  for (const auto& r : results) {
    if (r.not_ok > 0) return 1;
  }
  return 0;
}

}  // namespace petit
