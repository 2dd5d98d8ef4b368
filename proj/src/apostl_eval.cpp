#include "petit/apostl_eval.hpp"

#include <cmath>

#include "petit/apostl_parser.hpp"

namespace petit {

using namespace apostl;

namespace {

std::string scalar_to_text(const JsonValue& v, const std::string& what) {
  if (v.is_string()) return v.as_string();
  if (v.is_int()) return std::to_string(v.as_int());
  if (v.is_real()) {
    std::string s = std::to_string(v.as_real());
    return s;
  }
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  throw EvalError(what + " does not resolve to a scalar value");
}

const JsonValue& bound_property(const std::vector<std::string>& path, const EvalContext& ctx) {
  if (ctx.bound_variable == nullptr || ctx.bound_element == nullptr) {
    throw EvalError("unresolved parameter '" + path[0] + "'");
  }
  if (path[0] != *ctx.bound_variable) {
    throw EvalError("unresolved parameter '" + path[0] + "', quantifier binds '" +
                    *ctx.bound_variable + "'");
  }
  if (path.size() == 1) return *ctx.bound_element;
  const JsonValue* prop = ctx.bound_element->find(path[1]);
  if (prop == nullptr) {
    throw EvalError("collection element has no property '" + path[1] + "'");
  }
  return *prop;
}

HttpResponse perform_get(const std::string& path, const EvalContext& ctx) {
  if (ctx.transport == nullptr) throw EvalError("no transport available");
  return ctx.transport->send(HttpMethod::Get, ctx.base_url + path, std::nullopt);
}

EvalValue value_of_response(const OperationRef& op, int code, const std::optional<JsonValue>& body,
                            const std::string& display) {
  EvalValue out;
  switch (op.header) {
    case OpHeader::ResponseCode:
      out = EvalValue::from_code(code);
      break;
    case OpHeader::ResponseBody:
      if (body) {
        out = EvalValue::from_json(*body);
      } else {
        out = EvalValue::from_json(JsonValue::null());
      }
      break;
    case OpHeader::RequestBody:
      throw EvalError("request_body is not available for " + display);
  }
  if (op.function) {
    if (*op.function != "length") throw EvalError("unsupported function '." + *op.function + "'");
    if (out.kind != EvalValue::Kind::Json || !out.json.is_array()) {
      throw EvalError(".length applied to a non-array value of " + display);
    }
    out = EvalValue::from_int(static_cast<std::int64_t>(out.json.as_array().size()));
  }
  return out;
}

EvalValue eval_operation(const OperationRef& op, const EvalContext& ctx) {
  if (op.is_this) {
    EvalValue out;
    switch (op.header) {
      case OpHeader::RequestBody:
        if (ctx.this_request_body == nullptr) {
          throw EvalError("request_body(this) is not available for this operation");
        }
        out = EvalValue::from_json(*ctx.this_request_body);
        break;
      case OpHeader::ResponseBody:
        if (ctx.this_response == nullptr) throw EvalError("response_body(this) before the request");
        if (!ctx.this_response->body) {
          throw EvalError("the operation's response body is missing or not JSON");
        }
        out = EvalValue::from_json(*ctx.this_response->body);
        break;
      case OpHeader::ResponseCode:
        if (ctx.this_response == nullptr) throw EvalError("response_code(this) before the request");
        out = EvalValue::from_code(ctx.this_response->code);
        break;
    }
    if (op.function) {
      if (*op.function != "length") throw EvalError("unsupported function '." + *op.function + "'");
      if (out.kind != EvalValue::Kind::Json || !out.json.is_array()) {
        throw EvalError(".length applied to a non-array value");
      }
      out = EvalValue::from_int(static_cast<std::int64_t>(out.json.as_array().size()));
    }
    return out;
  }
  // checking stays pure: refuse anything but GET even if a caller skipped the
  // restriction checker
  if (op.request->method != HttpMethod::Get) {
    throw EvalError("non-GET operation inside a formula: " + pretty_print(op));
  }
  const std::string path = resolve_request_path(*op.request, ctx);
  const HttpResponse resp = perform_get(path, ctx);
  return value_of_response(op, resp.code, resp.body, "GET " + path);
}

EvalValue eval_previous(const Term& t, const EvalContext& ctx) {
  if (ctx.previous_results == nullptr) {
    throw EvalError("previous(...) used without snapshots");
  }
  const std::string key = pretty_print(t.operation);
  auto it = ctx.previous_results->find(key);
  if (it == ctx.previous_results->end()) {
    throw EvalError("no snapshot recorded for previous(" + key + ")");
  }
  return value_of_response(t.operation, it->second.code, it->second.body, key);
}

void collect_previous_refs(const BooleanExpr& e, std::vector<OperationRef>& out);

void collect_previous_in_request(const HttpRequestExpr& req, std::vector<OperationRef>& out) {
  for (const auto& segment : req.segments) {
    for (const auto& block : segment) {
      if (block.is_literal()) continue;
      const BlockParameter& p = block.parameter();
      if (p.kind == BlockParameter::Kind::NestedPrevious) {
        out.push_back(*p.operation);
      }
      if (p.operation && p.operation->request) {
        collect_previous_in_request(*p.operation->request, out);
      }
    }
  }
}

void collect_previous_in_term(const Term& t, std::vector<OperationRef>& out) {
  if (t.kind == Term::Kind::Previous) out.push_back(t.operation);
  if ((t.kind == Term::Kind::Previous || t.kind == Term::Kind::Operation) &&
      t.operation.request) {
    collect_previous_in_request(*t.operation.request, out);
  }
}

void collect_previous_refs(const BooleanExpr& e, std::vector<OperationRef>& out) {
  switch (e.kind) {
    case BooleanExpr::Kind::Binary:
      collect_previous_refs(*e.lhs, out);
      collect_previous_refs(*e.rhs, out);
      break;
    case BooleanExpr::Kind::Compare:
      collect_previous_in_term(e.comparison->lhs, out);
      collect_previous_in_term(e.comparison->rhs, out);
      break;
    default:
      break;
  }
}

std::vector<OperationRef> collect_previous_refs(const Formula& f) {
  std::vector<OperationRef> out;
  if (f.is_quantified()) {
    collect_previous_in_term(f.quantified().collection, out);
    collect_previous_refs(f.quantified().body, out);
  } else {
    collect_previous_refs(f.boolean(), out);
  }
  return out;
}

/// Rewrites {var.prop} placeholders in a boolean expression with the bound
/// element's values, leaving everything else untouched.
BooleanExpr substitute_bound_blocks(const BooleanExpr& e, const std::string& var,
                                    const JsonValue& elem);

HttpRequestExpr substitute_in_request(const HttpRequestExpr& req, const std::string& var,
                                      const JsonValue& elem) {
  HttpRequestExpr out = req;
  for (auto& segment : out.segments) {
    for (auto& block : segment) {
      if (block.is_literal()) continue;
      const BlockParameter& p = block.parameter();
      if (p.kind != BlockParameter::Kind::Name || p.path.empty() || p.path[0] != var) continue;
      const JsonValue* value = nullptr;
      if (p.path.size() == 1) {
        value = &elem;
      } else {
        value = elem.find(p.path[1]);
        if (value == nullptr) {
          throw EvalError("collection element has no property '" + p.path[1] + "'");
        }
      }
      block.value = scalar_to_text(*value, "block parameter '" + p.path.back() + "'");
    }
  }
  return out;
}

Term substitute_in_term(const Term& t, const std::string& var, const JsonValue& elem) {
  Term out = t;
  if ((out.kind == Term::Kind::Operation || out.kind == Term::Kind::Previous) &&
      out.operation.request) {
    out.operation.request = substitute_in_request(*out.operation.request, var, elem);
  }
  return out;
}

BooleanExpr substitute_bound_blocks(const BooleanExpr& e, const std::string& var,
                                    const JsonValue& elem) {
  switch (e.kind) {
    case BooleanExpr::Kind::Binary:
      return BooleanExpr::binary(e.op, substitute_bound_blocks(*e.lhs, var, elem),
                                 substitute_bound_blocks(*e.rhs, var, elem));
    case BooleanExpr::Kind::Compare: {
      Comparison c;
      c.lhs = substitute_in_term(e.comparison->lhs, var, elem);
      c.cmp = e.comparison->cmp;
      c.rhs = substitute_in_term(e.comparison->rhs, var, elem);
      return BooleanExpr::compare(std::move(c));
    }
    default:
      return e;
  }
}

}  // namespace

EvalValue EvalValue::from_int(std::int64_t v) {
  EvalValue out;
  out.kind = Kind::Num;
  out.num = v;
  return out;
}

EvalValue EvalValue::from_json(JsonValue v) {
  EvalValue out;
  out.kind = Kind::Json;
  out.json = std::move(v);
  return out;
}

EvalValue EvalValue::from_code(int c) {
  EvalValue out;
  out.kind = Kind::Code;
  out.code = c;
  return out;
}

std::optional<double> EvalValue::numeric() const {
  switch (kind) {
    case Kind::Num:
      return num.index() == 0 ? static_cast<double>(std::get<std::int64_t>(num))
                              : std::get<double>(num);
    case Kind::Code:
      return static_cast<double>(code);
    case Kind::Json:
      return json.as_number();
  }
  return std::nullopt;
}

bool EvalValue::is_exact_int() const {
  switch (kind) {
    case Kind::Num: return num.index() == 0;
    case Kind::Code: return true;
    case Kind::Json: return json.is_int();
  }
  return false;
}

std::int64_t EvalValue::exact_int() const {
  switch (kind) {
    case Kind::Num: return std::get<std::int64_t>(num);
    case Kind::Code: return code;
    case Kind::Json: return json.as_int();
  }
  return 0;
}

std::string resolve_request_path(const HttpRequestExpr& req, const EvalContext& ctx) {
  std::string path;
  for (const auto& segment : req.segments) {
    path += "/";
    for (std::size_t i = 0; i < segment.size(); ++i) {
      if (i > 0) path += ".";
      const UrlBlock& block = segment[i];
      if (block.is_literal()) {
        path += block.literal();
        continue;
      }
      const BlockParameter& p = block.parameter();
      switch (p.kind) {
        case BlockParameter::Kind::Name:
          path += scalar_to_text(bound_property(p.path, ctx),
                                 "block parameter '" + p.path.back() + "'");
          break;
        case BlockParameter::Kind::NestedOp: {
          const EvalValue v = eval_operation(*p.operation, ctx);
          if (v.kind == EvalValue::Kind::Code) {
            path += std::to_string(v.code);
          } else if (v.kind == EvalValue::Kind::Num) {
            path += v.is_exact_int() ? std::to_string(v.exact_int())
                                     : std::to_string(std::get<double>(v.num));
          } else {
            path += scalar_to_text(v.json, "nested operation result");
          }
          break;
        }
        case BlockParameter::Kind::NestedPrevious: {
          Term prev;
          prev.kind = Term::Kind::Previous;
          prev.operation = *p.operation;
          const EvalValue v = eval_previous(prev, ctx);
          if (v.kind == EvalValue::Kind::Code) {
            path += std::to_string(v.code);
          } else {
            path += scalar_to_text(v.json, "nested previous result");
          }
          break;
        }
      }
    }
  }
  return path;
}

EvalValue eval_term(const Term& t, const EvalContext& ctx) {
  switch (t.kind) {
    case Term::Kind::IntLit:
      return EvalValue::from_int(t.int_value);
    case Term::Kind::Param: {
      const JsonValue& v = bound_property(t.path, ctx);
      if (v.is_int()) return EvalValue::from_int(v.as_int());
      return EvalValue::from_json(v);
    }
    case Term::Kind::Operation:
      return eval_operation(t.operation, ctx);
    case Term::Kind::Previous:
      return eval_previous(t, ctx);
  }
  throw EvalError("unknown term");
}

bool compare_values(const EvalValue& lhs, Comparator cmp, const EvalValue& rhs) {
  const auto ln = lhs.numeric();
  const auto rn = rhs.numeric();
  if (ln && rn) {
    if (lhs.is_exact_int() && rhs.is_exact_int()) {
      const auto a = lhs.exact_int();
      const auto b = rhs.exact_int();
      switch (cmp) {
        case Comparator::Eq: return a == b;
        case Comparator::Ne: return a != b;
        case Comparator::Le: return a <= b;
        case Comparator::Ge: return a >= b;
        case Comparator::Lt: return a < b;
        case Comparator::Gt: return a > b;
      }
    }
    switch (cmp) {
      case Comparator::Eq: return *ln == *rn;
      case Comparator::Ne: return *ln != *rn;
      case Comparator::Le: return *ln <= *rn;
      case Comparator::Ge: return *ln >= *rn;
      case Comparator::Lt: return *ln < *rn;
      case Comparator::Gt: return *ln > *rn;
    }
  }
  if (cmp == Comparator::Eq || cmp == Comparator::Ne) {
    if (lhs.kind == EvalValue::Kind::Json && rhs.kind == EvalValue::Kind::Json) {
      const bool equal = masked_equals(lhs.json, rhs.json);
      return cmp == Comparator::Eq ? equal : !equal;
    }
    throw EvalError("type mismatch: cannot compare these values for equality");
  }
  throw EvalError("ordered comparison requires numeric values");
}

bool evaluate(const BooleanExpr& e, const EvalContext& ctx) {
  switch (e.kind) {
    case BooleanExpr::Kind::TrueLit:
      return true;
    case BooleanExpr::Kind::FalseLit:
      return false;
    case BooleanExpr::Kind::Compare:
      return compare_values(eval_term(e.comparison->lhs, ctx), e.comparison->cmp,
                            eval_term(e.comparison->rhs, ctx));
    case BooleanExpr::Kind::Binary:
      switch (e.op) {
        case BoolOp::And:
          return evaluate(*e.lhs, ctx) && evaluate(*e.rhs, ctx);
        case BoolOp::Or:
          return evaluate(*e.lhs, ctx) || evaluate(*e.rhs, ctx);
        case BoolOp::Implies:
          return !evaluate(*e.lhs, ctx) || evaluate(*e.rhs, ctx);
      }
  }
  throw EvalError("unknown boolean expression");
}

bool evaluate_quantified(const QuantifiedFormula& f, const EvalContext& ctx) {
  const bool universal = f.quantifier == Quantifier::ForAll;
  const EvalValue collection = eval_term(f.collection, ctx);
  if (collection.kind != EvalValue::Kind::Json || !collection.json.is_array()) {
    throw EvalError("quantifier collection is not an array");
  }
  for (const JsonValue& elem : collection.json.as_array()) {
    // substitute the element's values, then re-parse the resulting text
    const BooleanExpr substituted = substitute_bound_blocks(f.body, f.variable, elem);
    const Formula reparsed = apostl::parse_formula(pretty_print(substituted));
    EvalContext inner = ctx;
    inner.bound_variable = &f.variable;
    inner.bound_element = &elem;
    const bool partial = evaluate(reparsed.boolean(), inner);
    if (universal && !partial) return false;   // first false element decides
    if (!universal && partial) return true;    // first true element decides
  }
  return universal;  // empty or exhausted: vacuous truth / falsity
}

bool evaluate(const Formula& f, const EvalContext& ctx) {
  if (f.is_quantified()) return evaluate_quantified(f.quantified(), ctx);
  return evaluate(f.boolean(), ctx);
}

SnapshotMap snapshot_previous(const std::vector<Formula>& postconditions, const EvalContext& ctx) {
  SnapshotMap out;
  for (const auto& f : postconditions) {
    for (const OperationRef& ref : collect_previous_refs(f)) {
      const std::string key = pretty_print(ref);
      if (out.count(key)) continue;  // duplicates executed once
      if (ref.is_this || !ref.request) continue;
      try {
        const std::string path = resolve_request_path(*ref.request, ctx);
        const HttpResponse resp = perform_get(path, ctx);
        out.emplace(key, Snapshot{resp.code, resp.body});
      } catch (const TransportError&) {
        out.emplace(key, Snapshot{0, std::nullopt});
      } catch (const EvalError&) {
        // unresolved placeholder: leave unbound, the condition will report it
      }
    }
  }
  return out;
}

bool contains_previous(const Formula& f) { return !collect_previous_refs(f).empty(); }

}  // namespace petit
