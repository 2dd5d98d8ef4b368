#include "petit/apostl_parser.hpp"

#include <cctype>
#include <map>
#include <sstream>

namespace petit::apostl {

namespace {

enum class TokType {
  KwFor, KwExists, KwIn, KwPrevious, KwThis,
  KwRequestBody, KwResponseBody, KwResponseCode,
  KwGet, KwPost, KwPut, KwDelete,
  KwTrue, KwFalse,
  Ident, Int,
  LParen, RParen, LBrace, RBrace, Slash, Dot, Turnstile,
  EqEq, Neq, Le, Ge, Lt, Gt, AndAnd, OrOr, Implies,
  End,
};

struct Token {
  TokType type;
  std::string text;
  std::int64_t int_value = 0;
  std::size_t pos = 0;
};

const std::map<std::string, TokType, std::less<>> kKeywords = {
    {"for", TokType::KwFor},
    {"exists", TokType::KwExists},
    {"in", TokType::KwIn},
    {"previous", TokType::KwPrevious},
    {"this", TokType::KwThis},
    {"request_body", TokType::KwRequestBody},
    {"response_body", TokType::KwResponseBody},
    {"response_code", TokType::KwResponseCode},
    {"GET", TokType::KwGet},
    {"POST", TokType::KwPost},
    {"PUT", TokType::KwPut},
    {"DELETE", TokType::KwDelete},
    {"T", TokType::KwTrue},
    {"F", TokType::KwFalse},
};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string describe(const Token& t) {
  if (t.type == TokType::End) return "end of input";
  return "'" + t.text + "'";
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> toks;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto push = [&](TokType type, std::size_t start, std::size_t len) {
    toks.push_back({type, std::string(text.substr(start, len)), 0, start});
  };
  while (i < n) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    auto two = [&](char a, char b) {
      return c == a && i + 1 < n && text[i + 1] == b;
    };
    if (two(':', '-')) { push(TokType::Turnstile, start, 2); i += 2; continue; }
    if (two('=', '=')) { push(TokType::EqEq, start, 2); i += 2; continue; }
    if (two('!', '=')) { push(TokType::Neq, start, 2); i += 2; continue; }
    if (two('<', '=')) { push(TokType::Le, start, 2); i += 2; continue; }
    if (two('>', '=')) { push(TokType::Ge, start, 2); i += 2; continue; }
    if (two('&', '&')) { push(TokType::AndAnd, start, 2); i += 2; continue; }
    if (two('|', '|')) { push(TokType::OrOr, start, 2); i += 2; continue; }
    if (two('=', '>')) { push(TokType::Implies, start, 2); i += 2; continue; }
    switch (c) {
      case '(': push(TokType::LParen, start, 1); ++i; continue;
      case ')': push(TokType::RParen, start, 1); ++i; continue;
      case '{': push(TokType::LBrace, start, 1); ++i; continue;
      case '}': push(TokType::RBrace, start, 1); ++i; continue;
      case '/': push(TokType::Slash, start, 1); ++i; continue;
      case '.': push(TokType::Dot, start, 1); ++i; continue;
      case '<': push(TokType::Lt, start, 1); ++i; continue;
      case '>': push(TokType::Gt, start, 1); ++i; continue;
      default: break;
    }
    const bool negative = c == '-' && i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1]));
    if (std::isdigit(static_cast<unsigned char>(c)) || negative) {
      std::size_t j = i + (negative ? 1 : 0);
      while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      Token t{TokType::Int, std::string(text.substr(i, j - i)), 0, start};
      t.int_value = std::stoll(t.text);
      toks.push_back(std::move(t));
      i = j;
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i + 1;
      while (j < n && ident_char(text[j])) ++j;
      std::string word(text.substr(i, j - i));
      auto kw = kKeywords.find(word);
      toks.push_back({kw == kKeywords.end() ? TokType::Ident : kw->second, std::move(word), 0, start});
      i = j;
      continue;
    }
    throw SyntaxError(start, "a token", "'" + std::string(1, c) + "'");
  }
  toks.push_back({TokType::End, "", 0, n});
  return toks;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  Formula parse() {
    Formula f;
    if (peek().type == TokType::KwFor || peek().type == TokType::KwExists) {
      f.value = quantified();
    } else {
      f.value = boolean();
    }
    expect(TokType::End, "end of input");
    return f;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t idx = pos_ + ahead;
    return idx < toks_.size() ? toks_[idx] : toks_.back();
  }

  const Token& advance() { return toks_[pos_++]; }

  bool accept(TokType t) {
    if (peek().type == t) {
      ++pos_;
      return true;
    }
    return false;
  }

  const Token& expect(TokType t, const std::string& what) {
    if (peek().type != t) throw SyntaxError(peek().pos, what, describe(peek()));
    return advance();
  }

  QuantifiedFormula quantified() {
    QuantifiedFormula q;
    q.quantifier = advance().type == TokType::KwFor ? Quantifier::ForAll : Quantifier::Exists;
    q.variable = expect(TokType::Ident, "a quantifier variable").text;
    expect(TokType::KwIn, "'in'");
    q.collection = call();
    expect(TokType::Turnstile, "':-'");
    q.body = boolean();
    return q;
  }

  Term call() {
    if (peek().type == TokType::KwPrevious) return previous_term();
    if (is_header(peek().type)) return operation_term();
    throw SyntaxError(peek().pos, "an operation or previous(...)", describe(peek()));
  }

  // precedence: && binds tighter than ||, || tighter than =>;
  // && and || left-associative, => right-associative
  BooleanExpr boolean() { return implies_expr(); }

  BooleanExpr implies_expr() {
    BooleanExpr left = or_expr();
    if (accept(TokType::Implies)) {
      return BooleanExpr::binary(BoolOp::Implies, std::move(left), implies_expr());
    }
    return left;
  }

  BooleanExpr or_expr() {
    BooleanExpr left = and_expr();
    while (accept(TokType::OrOr)) {
      left = BooleanExpr::binary(BoolOp::Or, std::move(left), and_expr());
    }
    return left;
  }

  BooleanExpr and_expr() {
    BooleanExpr left = clause();
    while (accept(TokType::AndAnd)) {
      left = BooleanExpr::binary(BoolOp::And, std::move(left), clause());
    }
    return left;
  }

  BooleanExpr clause() {
    if (accept(TokType::KwTrue)) return BooleanExpr::literal(true);
    if (accept(TokType::KwFalse)) return BooleanExpr::literal(false);
    Comparison c;
    c.lhs = term();
    c.cmp = comparator();
    c.rhs = term();
    return BooleanExpr::compare(std::move(c));
  }

  Comparator comparator() {
    switch (peek().type) {
      case TokType::EqEq: advance(); return Comparator::Eq;
      case TokType::Neq: advance(); return Comparator::Ne;
      case TokType::Le: advance(); return Comparator::Le;
      case TokType::Ge: advance(); return Comparator::Ge;
      case TokType::Lt: advance(); return Comparator::Lt;
      case TokType::Gt: advance(); return Comparator::Gt;
      default:
        throw SyntaxError(peek().pos, "a comparator", describe(peek()));
    }
  }

  Term term() {
    if (peek().type == TokType::KwPrevious) return previous_term();
    if (is_header(peek().type)) return operation_term();
    if (peek().type == TokType::Int) {
      Term t;
      t.kind = Term::Kind::IntLit;
      t.int_value = advance().int_value;
      return t;
    }
    if (peek().type == TokType::Ident) {
      Term t;
      t.kind = Term::Kind::Param;
      t.path = dotted_path();
      return t;
    }
    throw SyntaxError(peek().pos, "a term", describe(peek()));
  }

  Term previous_term() {
    advance();  // previous
    expect(TokType::LParen, "'('");
    Term t;
    t.kind = Term::Kind::Previous;
    t.operation = operation();
    expect(TokType::RParen, "')'");
    return t;
  }

  Term operation_term() {
    Term t;
    t.kind = Term::Kind::Operation;
    t.operation = operation();
    return t;
  }

  static bool is_header(TokType t) {
    return t == TokType::KwRequestBody || t == TokType::KwResponseBody ||
           t == TokType::KwResponseCode;
  }

  OperationRef operation() {
    OperationRef op;
    switch (advance().type) {
      case TokType::KwRequestBody: op.header = OpHeader::RequestBody; break;
      case TokType::KwResponseBody: op.header = OpHeader::ResponseBody; break;
      case TokType::KwResponseCode: op.header = OpHeader::ResponseCode; break;
      default:
        throw SyntaxError(peek().pos, "an operation header", describe(toks_[pos_ - 1]));
    }
    expect(TokType::LParen, "'('");
    if (accept(TokType::KwThis)) {
      op.is_this = true;
    } else {
      op.request = http_request();
    }
    expect(TokType::RParen, "')'");
    if (peek().type == TokType::Dot) {
      advance();
      op.function = expect(TokType::Ident, "a function name").text;
    }
    return op;
  }

  HttpRequestExpr http_request() {
    HttpRequestExpr req;
    switch (peek().type) {
      case TokType::KwGet: req.method = HttpMethod::Get; break;
      case TokType::KwPost: req.method = HttpMethod::Post; break;
      case TokType::KwPut: req.method = HttpMethod::Put; break;
      case TokType::KwDelete: req.method = HttpMethod::Delete; break;
      default:
        throw SyntaxError(peek().pos, "an HTTP method", describe(peek()));
    }
    advance();
    if (peek().type != TokType::Slash) {
      throw SyntaxError(peek().pos, "'/'", describe(peek()));
    }
    while (accept(TokType::Slash)) {
      UrlSegment segment;
      segment.push_back(block());
      while (peek().type == TokType::Dot) {
        advance();
        segment.push_back(block());
      }
      req.segments.push_back(std::move(segment));
    }
    return req;
  }

  UrlBlock block() {
    UrlBlock b;
    if (accept(TokType::LBrace)) {
      b.value = block_parameter();
      expect(TokType::RBrace, "'}'");
      return b;
    }
    // URL literals may be plain words, numbers, or keyword-shaped text
    const Token& t = peek();
    if (t.type == TokType::Ident || t.type == TokType::Int || is_keyword(t.type)) {
      b.value = advance().text;
      return b;
    }
    throw SyntaxError(t.pos, "a URL block", describe(t));
  }

  static bool is_keyword(TokType t) {
    switch (t) {
      case TokType::KwFor: case TokType::KwExists: case TokType::KwIn:
      case TokType::KwPrevious: case TokType::KwThis:
      case TokType::KwRequestBody: case TokType::KwResponseBody:
      case TokType::KwResponseCode:
      case TokType::KwGet: case TokType::KwPost: case TokType::KwPut:
      case TokType::KwDelete: case TokType::KwTrue: case TokType::KwFalse:
        return true;
      default:
        return false;
    }
  }

  BlockParameter block_parameter() {
    BlockParameter p;
    if (peek().type == TokType::KwPrevious) {
      advance();
      expect(TokType::LParen, "'('");
      p.kind = BlockParameter::Kind::NestedPrevious;
      p.operation = std::make_shared<OperationRef>(operation());
      expect(TokType::RParen, "')'");
      return p;
    }
    if (is_header(peek().type)) {
      p.kind = BlockParameter::Kind::NestedOp;
      p.operation = std::make_shared<OperationRef>(operation());
      return p;
    }
    p.kind = BlockParameter::Kind::Name;
    p.path = dotted_path();
    return p;
  }

  // Accepts arbitrarily deep dotted chains; the depth cap is enforced by the
  // restriction checker, not the grammar.
  std::vector<std::string> dotted_path() {
    std::vector<std::string> path;
    path.push_back(expect(TokType::Ident, "an identifier").text);
    while (peek().type == TokType::Dot && peek(1).type == TokType::Ident) {
      advance();
      path.push_back(advance().text);
    }
    return path;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

void check_operation(const OperationRef& op, bool this_allowed, std::vector<Violation>& out);

void check_block_parameter(const BlockParameter& p, std::vector<Violation>& out) {
  switch (p.kind) {
    case BlockParameter::Kind::Name:
      if (p.path.size() > 2) {
        out.push_back({Violation::Kind::DepthTwoBlockParameter,
                       "block parameter '" + [&] {
                         std::string s;
                         for (std::size_t i = 0; i < p.path.size(); ++i) {
                           if (i > 0) s += ".";
                           s += p.path[i];
                         }
                         return s;
                       }() + "' exceeds depth one"});
      }
      break;
    case BlockParameter::Kind::NestedOp:
    case BlockParameter::Kind::NestedPrevious:
      check_operation(*p.operation, /*this_allowed=*/false, out);
      break;
  }
}

void check_operation(const OperationRef& op, bool this_allowed, std::vector<Violation>& out) {
  if (op.is_this && !this_allowed) {
    out.push_back({Violation::Kind::ThisOutsideComparison,
                   "'this' may only appear in comparisons"});
  }
  if (op.function && *op.function != "length") {
    out.push_back({Violation::Kind::UnknownFunction,
                   "unsupported function '." + *op.function + "'"});
  }
  if (op.request) {
    if (op.request->method != HttpMethod::Get) {
      out.push_back({Violation::Kind::NonPureOperation,
                     "only GET operations can be used, found " + to_string(op.request->method)});
    }
    for (const auto& segment : op.request->segments) {
      for (const auto& b : segment) {
        if (!b.is_literal()) check_block_parameter(b.parameter(), out);
      }
    }
  }
}

void check_term(const Term& t, std::vector<Violation>& out) {
  switch (t.kind) {
    case Term::Kind::Operation:
    case Term::Kind::Previous:
      check_operation(t.operation, /*this_allowed=*/true, out);
      break;
    case Term::Kind::Param:
      if (t.path.size() > 2) {
        out.push_back({Violation::Kind::DepthTwoBlockParameter,
                       "parameter access deeper than one level"});
      }
      break;
    case Term::Kind::IntLit:
      break;
  }
}

void check_boolean(const BooleanExpr& e, std::vector<Violation>& out) {
  switch (e.kind) {
    case BooleanExpr::Kind::Binary:
      check_boolean(*e.lhs, out);
      check_boolean(*e.rhs, out);
      break;
    case BooleanExpr::Kind::Compare:
      check_term(e.comparison->lhs, out);
      check_term(e.comparison->rhs, out);
      break;
    default:
      break;
  }
}

}  // namespace

SyntaxError::SyntaxError(std::size_t position, std::string expected, std::string found)
    : std::runtime_error("syntax error at position " + std::to_string(position) + ": expected " +
                         expected + ", found " + found),
      position_(position),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

Formula parse_formula(std::string_view text) { return Parser(text).parse(); }

std::vector<Violation> check_restrictions(const Formula& f) {
  std::vector<Violation> out;
  if (f.is_quantified()) {
    const QuantifiedFormula& q = f.quantified();
    // the collection call must be a request, never `this`
    check_operation(q.collection.operation, /*this_allowed=*/false, out);
    check_boolean(q.body, out);
  } else {
    check_boolean(f.boolean(), out);
  }
  return out;
}

std::string to_string(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::NonPureOperation: return "NonPureOperation";
    case Violation::Kind::ThisOutsideComparison: return "ThisOutsideComparison";
    case Violation::Kind::DepthTwoBlockParameter: return "DepthTwoBlockParameter";
    case Violation::Kind::UnknownFunction: return "UnknownFunction";
  }
  return "Violation";
}

}  // namespace petit::apostl
