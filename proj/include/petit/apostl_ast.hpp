#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace petit::apostl {

enum class HttpMethod { Get, Post, Put, Delete };
enum class OpHeader { RequestBody, ResponseBody, ResponseCode };
enum class Comparator { Eq, Ne, Le, Ge, Lt, Gt };
enum class BoolOp { And, Or, Implies };
enum class Quantifier { ForAll, Exists };

struct OperationRef;

/// A `{...}` placeholder inside a formula URL: either a dotted name (a URL
/// parameter or quantifier-variable access) or a nested operation call.
struct BlockParameter {
  enum class Kind { Name, NestedOp, NestedPrevious };
  Kind kind = Kind::Name;
  std::vector<std::string> path;            // Kind::Name
  std::shared_ptr<OperationRef> operation;  // nested kinds
};

/// One dot-separated piece of a URL segment: literal text or a placeholder.
struct UrlBlock {
  std::variant<std::string, BlockParameter> value;

  bool is_literal() const { return value.index() == 0; }
  const std::string& literal() const { return std::get<std::string>(value); }
  const BlockParameter& parameter() const { return std::get<BlockParameter>(value); }
};

using UrlSegment = std::vector<UrlBlock>;

struct HttpRequestExpr {
  HttpMethod method = HttpMethod::Get;
  std::vector<UrlSegment> segments;  // at least one, each non-empty
};

/// request_body/response_body/response_code applied to `this` or to an HTTP
/// request, with an optional trailing function such as `.length`.
struct OperationRef {
  OpHeader header = OpHeader::ResponseCode;
  bool is_this = false;
  std::optional<HttpRequestExpr> request;  // present iff !is_this
  std::optional<std::string> function;
};

struct Term {
  enum class Kind { Operation, Previous, Param, IntLit };
  Kind kind = Kind::IntLit;
  OperationRef operation;         // Operation / Previous
  std::vector<std::string> path;  // Param (dotted, length 1..2 after checks)
  std::int64_t int_value = 0;     // IntLit
};

struct Comparison {
  Term lhs;
  Comparator cmp = Comparator::Eq;
  Term rhs;
};

/// Boolean expressions cannot derive quantified formulas, so quantifier
/// non-nesting holds by construction.
struct BooleanExpr {
  enum class Kind { Binary, TrueLit, FalseLit, Compare };
  Kind kind = Kind::TrueLit;
  BoolOp op = BoolOp::And;
  std::shared_ptr<BooleanExpr> lhs;
  std::shared_ptr<BooleanExpr> rhs;
  std::optional<Comparison> comparison;

  static BooleanExpr binary(BoolOp op, BooleanExpr l, BooleanExpr r);
  static BooleanExpr literal(bool value);
  static BooleanExpr compare(Comparison c);
};

struct QuantifiedFormula {
  Quantifier quantifier = Quantifier::ForAll;
  std::string variable;
  Term collection;  // Kind::Operation or Kind::Previous
  BooleanExpr body;
};

struct Formula {
  std::variant<QuantifiedFormula, BooleanExpr> value;

  bool is_quantified() const { return value.index() == 0; }
  const QuantifiedFormula& quantified() const { return std::get<QuantifiedFormula>(value); }
  const BooleanExpr& boolean() const { return std::get<BooleanExpr>(value); }
};

std::string to_string(HttpMethod m);
std::string to_string(OpHeader h);
std::string to_string(Comparator c);
std::string to_string(BoolOp op);

/// Canonical single-line rendering; re-parsing the output yields a
/// structurally equal AST.
std::string pretty_print(const Formula& f);
std::string pretty_print(const BooleanExpr& e);
std::string pretty_print(const Comparison& c);
std::string pretty_print(const Term& t);
std::string pretty_print(const OperationRef& op);
std::string pretty_print(const HttpRequestExpr& req);

bool structurally_equal(const Formula& a, const Formula& b);

}  // namespace petit::apostl
