#include "petit/datagen.hpp"

#include <algorithm>
#include <set>

namespace petit {

namespace {

constexpr std::int64_t kMaxRandomInt = 1'000'000'000;
constexpr int kUnboundedRepeatCap = 10;

[[noreturn]] void fail(DatagenError::Kind kind, const std::string& message) {
  throw DatagenError(kind, message);
}

}  // namespace

namespace regex {

namespace {

class PatternParser {
 public:
  explicit PatternParser(std::string_view text) : text_(text) {}

  PatternPtr parse() {
    PatternPtr p = alternation();
    if (pos_ != text_.size()) {
      fail(DatagenError::Kind::MalformedRegex,
           "unexpected '" + std::string(1, text_[pos_]) + "' at offset " + std::to_string(pos_));
    }
    return p;
  }

 private:
  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  static PatternPtr make(Pattern p) { return std::make_shared<const Pattern>(std::move(p)); }

  PatternPtr alternation() {
    std::vector<PatternPtr> branches;
    branches.push_back(concat());
    while (!done() && peek() == '|') {
      ++pos_;
      branches.push_back(concat());
    }
    if (branches.size() == 1) return branches[0];
    Pattern p;
    p.kind = Pattern::Kind::Alternation;
    p.children = std::move(branches);
    return make(std::move(p));
  }

  PatternPtr concat() {
    Pattern p;
    p.kind = Pattern::Kind::Concat;
    while (!done() && peek() != '|' && peek() != ')') {
      p.children.push_back(repeat());
    }
    if (p.children.size() == 1) return p.children[0];
    return make(std::move(p));
  }

  PatternPtr repeat() {
    PatternPtr atom_p = atom();
    if (done()) return atom_p;
    int min = 0;
    int max = 0;
    switch (peek()) {
      case '?': min = 0; max = 1; ++pos_; break;
      case '*': min = 0; max = kUnboundedRepeatCap; ++pos_; break;
      case '+': min = 1; max = kUnboundedRepeatCap; ++pos_; break;
      case '{': {
        ++pos_;
        min = number();
        if (!done() && peek() == ',') {
          ++pos_;
          if (!done() && peek() == '}') {
            max = std::max(min, kUnboundedRepeatCap);  // {m,}
          } else {
            max = number();
          }
        } else {
          max = min;  // {n}
        }
        if (done() || peek() != '}') {
          fail(DatagenError::Kind::MalformedRegex, "unterminated repetition quantifier");
        }
        ++pos_;
        break;
      }
      default:
        return atom_p;
    }
    if (min > max) {
      fail(DatagenError::Kind::MalformedRegex, "repetition minimum exceeds maximum");
    }
    Pattern p;
    p.kind = Pattern::Kind::Repeat;
    p.inner = std::move(atom_p);
    p.min = min;
    p.max = max;
    return make(std::move(p));
  }

  int number() {
    if (done() || !std::isdigit(static_cast<unsigned char>(peek()))) {
      fail(DatagenError::Kind::MalformedRegex, "expected a number in quantifier");
    }
    int n = 0;
    while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) {
      n = n * 10 + (text_[pos_++] - '0');
    }
    return n;
  }

  PatternPtr atom() {
    if (done()) fail(DatagenError::Kind::MalformedRegex, "pattern ends unexpectedly");
    const char c = text_[pos_];
    switch (c) {
      case '(': {
        ++pos_;
        if (!done() && peek() == '?') {
          fail(DatagenError::Kind::UnsupportedRegexFeature,
               "lookaround and non-capturing groups are not supported");
        }
        PatternPtr inner = alternation();
        if (done() || peek() != ')') {
          fail(DatagenError::Kind::MalformedRegex, "unbalanced '('");
        }
        ++pos_;
        return inner;
      }
      case '[':
        return char_class();
      case '.': {
        ++pos_;
        Pattern p;
        p.kind = Pattern::Kind::Class;
        for (char ch = 0x21; ch <= 0x7e; ++ch) p.char_set.push_back(ch);
        return make(std::move(p));
      }
      case '\\': {
        ++pos_;
        if (done()) fail(DatagenError::Kind::MalformedRegex, "dangling escape");
        const char esc = text_[pos_++];
        if (std::isalnum(static_cast<unsigned char>(esc)) && esc != 'n' && esc != 't') {
          fail(DatagenError::Kind::UnsupportedRegexFeature,
               std::string("escape class '\\") + esc + "' is not supported");
        }
        Pattern p;
        p.literal = esc == 'n' ? '\n' : esc == 't' ? '\t' : esc;
        return make(std::move(p));
      }
      case '^':
      case '$':
        fail(DatagenError::Kind::UnsupportedRegexFeature, "anchors are not supported");
      case ')':
      case '|':
      case '*':
      case '+':
      case '?':
      case '{':
        fail(DatagenError::Kind::MalformedRegex,
             "unexpected '" + std::string(1, c) + "' at offset " + std::to_string(pos_));
      default: {
        ++pos_;
        Pattern p;
        p.literal = c;
        return make(std::move(p));
      }
    }
  }

  PatternPtr char_class() {
    ++pos_;  // '['
    if (!done() && peek() == '^') {
      fail(DatagenError::Kind::UnsupportedRegexFeature, "negated classes are not supported");
    }
    std::set<char> chars;
    while (!done() && peek() != ']') {
      char lo = text_[pos_++];
      if (lo == '\\') {
        if (done()) fail(DatagenError::Kind::MalformedRegex, "dangling escape in class");
        lo = text_[pos_++];
      }
      if (!done() && peek() == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] != ']') {
        ++pos_;
        char hi = text_[pos_++];
        if (hi == '\\') {
          if (done()) fail(DatagenError::Kind::MalformedRegex, "dangling escape in class");
          hi = text_[pos_++];
        }
        if (hi < lo) fail(DatagenError::Kind::MalformedRegex, "inverted range in class");
        for (char ch = lo; ch <= hi; ++ch) chars.insert(ch);
      } else {
        chars.insert(lo);
      }
    }
    if (done()) fail(DatagenError::Kind::MalformedRegex, "unbalanced '['");
    ++pos_;  // ']'
    if (chars.empty()) fail(DatagenError::Kind::MalformedRegex, "empty character class");
    Pattern p;
    p.kind = Pattern::Kind::Class;
    p.char_set.assign(chars.begin(), chars.end());
    return make(std::move(p));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

PatternPtr parse_pattern(std::string_view pattern) { return PatternParser(pattern).parse(); }

std::string sample(const Pattern& p, Rng& rng) {
  switch (p.kind) {
    case Pattern::Kind::Alternation:
      return sample(*p.children[rng.index(p.children.size())], rng);
    case Pattern::Kind::Concat: {
      std::string out;
      for (const auto& child : p.children) out += sample(*child, rng);
      return out;
    }
    case Pattern::Kind::Class:
      return std::string(1, p.char_set[rng.index(p.char_set.size())]);
    case Pattern::Kind::Literal:
      return std::string(1, p.literal);
    case Pattern::Kind::Repeat: {
      const auto count = rng.uniform(p.min, p.max);
      std::string out;
      for (std::int64_t i = 0; i < count; ++i) out += sample(*p.inner, rng);
      return out;
    }
  }
  return "";
}

}  // namespace regex

std::string sample_regex(std::string_view pattern, Rng& rng) {
  return regex::sample(*regex::parse_pattern(pattern), rng);
}

std::string random_plain_string(Rng& rng) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_ -";
  const auto len = rng.uniform(8, 48);
  std::string out;
  out.reserve(static_cast<std::size_t>(len));
  for (std::int64_t i = 0; i < len; ++i) {
    out.push_back(kAlphabet[rng.index(sizeof(kAlphabet) - 1)]);
  }
  return out;
}

std::int64_t random_positive_int(Rng& rng, std::int64_t minimum) {
  return rng.uniform(minimum, std::max(minimum, kMaxRandomInt));
}

JsonValue generate_from_schema(const SchemaDef& schema, const ApiSpec& spec, Rng& rng) {
  JsonValue::Object members;
  for (const auto& prop : schema.properties) {
    if (prop.db_generated) {
      members.emplace_back(prop.name, JsonValue::generated());
      continue;
    }
    switch (prop.kind) {
      case PropertyKind::String:
        members.emplace_back(prop.name, JsonValue::str(prop.regex ? sample_regex(*prop.regex, rng)
                                                                  : random_plain_string(rng)));
        break;
      case PropertyKind::Integer:
        members.emplace_back(
            prop.name, JsonValue::integer(random_positive_int(rng, prop.minimum.value_or(1))));
        break;
      case PropertyKind::Number:
        members.emplace_back(
            prop.name,
            JsonValue::real(static_cast<double>(random_positive_int(rng, prop.minimum.value_or(1)))));
        break;
      case PropertyKind::Array:
        members.emplace_back(prop.name, JsonValue::array());
        break;
      case PropertyKind::Object: {
        const SchemaDef* nested = prop.nested ? spec.find_schema(*prop.nested) : nullptr;
        if (nested == nullptr) {
          fail(DatagenError::Kind::UnsupportedPropertyKind,
               "object property '" + prop.name + "' has no resolvable schema");
        }
        members.emplace_back(prop.name, generate_from_schema(*nested, spec, rng));
        break;
      }
    }
  }
  return JsonValue::object(std::move(members));
}

JsonValue generate_url_param(const ParamSpec& param, Rng& rng) {
  if (param.kind == ParamKind::String) {
    if (!param.regex) {
      fail(DatagenError::Kind::MissingRegex,
           "string parameter '" + param.name + "' has no x-regex to generate from");
    }
    return JsonValue::str(sample_regex(*param.regex, rng));
  }
  return JsonValue::integer(random_positive_int(rng, param.minimum.value_or(1)));
}

JsonValue generate(const OperationSpec& op, const ApiSpec& spec, Rng& rng) {
  using apostl::HttpMethod;
  if (op.method == HttpMethod::Post || op.method == HttpMethod::Put) {
    const SchemaDef* schema = op.body_schema ? spec.find_schema(*op.body_schema) : nullptr;
    if (schema == nullptr) {
      fail(DatagenError::Kind::MissingSchema,
           op.display_name() + " has no resolvable request body schema");
    }
    return generate_from_schema(*schema, spec, rng);
  }
  JsonValue::Object params;
  for (const auto& p : op.parameters) {
    params.emplace_back(p.name, generate_url_param(p, rng));
  }
  return JsonValue::object(std::move(params));
}

}  // namespace petit
