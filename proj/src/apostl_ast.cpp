#include "petit/apostl_ast.hpp"

#include <sstream>

namespace petit::apostl {

BooleanExpr BooleanExpr::binary(BoolOp op, BooleanExpr l, BooleanExpr r) {
  BooleanExpr e;
  e.kind = Kind::Binary;
  e.op = op;
  e.lhs = std::make_shared<BooleanExpr>(std::move(l));
  e.rhs = std::make_shared<BooleanExpr>(std::move(r));
  return e;
}

BooleanExpr BooleanExpr::literal(bool value) {
  BooleanExpr e;
  e.kind = value ? Kind::TrueLit : Kind::FalseLit;
  return e;
}

BooleanExpr BooleanExpr::compare(Comparison c) {
  BooleanExpr e;
  e.kind = Kind::Compare;
  e.comparison = std::move(c);
  return e;
}

std::string to_string(HttpMethod m) {
  switch (m) {
    case HttpMethod::Get: return "GET";
    case HttpMethod::Post: return "POST";
    case HttpMethod::Put: return "PUT";
    case HttpMethod::Delete: return "DELETE";
  }
  return "GET";
}

std::string to_string(OpHeader h) {
  switch (h) {
    case OpHeader::RequestBody: return "request_body";
    case OpHeader::ResponseBody: return "response_body";
    case OpHeader::ResponseCode: return "response_code";
  }
  return "response_code";
}

std::string to_string(Comparator c) {
  switch (c) {
    case Comparator::Eq: return "==";
    case Comparator::Ne: return "!=";
    case Comparator::Le: return "<=";
    case Comparator::Ge: return ">=";
    case Comparator::Lt: return "<";
    case Comparator::Gt: return ">";
  }
  return "==";
}

std::string to_string(BoolOp op) {
  switch (op) {
    case BoolOp::And: return "&&";
    case BoolOp::Or: return "||";
    case BoolOp::Implies: return "=>";
  }
  return "&&";
}

namespace {

std::string join_path(const std::vector<std::string>& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) out += ".";
    out += path[i];
  }
  return out;
}

std::string print_block(const UrlBlock& b) {
  if (b.is_literal()) return b.literal();
  const BlockParameter& p = b.parameter();
  switch (p.kind) {
    case BlockParameter::Kind::Name:
      return "{" + join_path(p.path) + "}";
    case BlockParameter::Kind::NestedOp:
      return "{" + pretty_print(*p.operation) + "}";
    case BlockParameter::Kind::NestedPrevious:
      return "{previous(" + pretty_print(*p.operation) + ")}";
  }
  return "{}";
}

}  // namespace

std::string pretty_print(const HttpRequestExpr& req) {
  std::string out = to_string(req.method) + " ";
  for (const auto& segment : req.segments) {
    out += "/";
    for (std::size_t i = 0; i < segment.size(); ++i) {
      if (i > 0) out += ".";
      out += print_block(segment[i]);
    }
  }
  return out;
}

std::string pretty_print(const OperationRef& op) {
  std::string out = to_string(op.header) + "(";
  out += op.is_this ? "this" : pretty_print(*op.request);
  out += ")";
  if (op.function) out += "." + *op.function;
  return out;
}

std::string pretty_print(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Operation:
      return pretty_print(t.operation);
    case Term::Kind::Previous:
      return "previous(" + pretty_print(t.operation) + ")";
    case Term::Kind::Param:
      return join_path(t.path);
    case Term::Kind::IntLit:
      return std::to_string(t.int_value);
  }
  return "";
}

std::string pretty_print(const Comparison& c) {
  return pretty_print(c.lhs) + " " + to_string(c.cmp) + " " + pretty_print(c.rhs);
}

std::string pretty_print(const BooleanExpr& e) {
  switch (e.kind) {
    case BooleanExpr::Kind::Binary:
      return pretty_print(*e.lhs) + " " + to_string(e.op) + " " + pretty_print(*e.rhs);
    case BooleanExpr::Kind::TrueLit:
      return "T";
    case BooleanExpr::Kind::FalseLit:
      return "F";
    case BooleanExpr::Kind::Compare:
      return pretty_print(*e.comparison);
  }
  return "";
}

std::string pretty_print(const Formula& f) {
  if (f.is_quantified()) {
    const QuantifiedFormula& q = f.quantified();
    std::string out = q.quantifier == Quantifier::ForAll ? "for " : "exists ";
    out += q.variable + " in " + pretty_print(q.collection) + " :- " + pretty_print(q.body);
    return out;
  }
  return pretty_print(f.boolean());
}

bool structurally_equal(const Formula& a, const Formula& b) {
  // The printer is injective on parser output, so canonical text decides.
  return pretty_print(a) == pretty_print(b);
}

}  // namespace petit::apostl
