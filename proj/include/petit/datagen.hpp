#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "petit/json_value.hpp"
#include "petit/rng.hpp"
#include "petit/spec_model.hpp"

namespace petit {

class DatagenError : public std::runtime_error {
 public:
  enum class Kind {
    MissingSchema,
    MissingRegex,
    UnsupportedRegexFeature,
    MalformedRegex,
    UnsupportedPropertyKind,
  };

  DatagenError(Kind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

namespace regex {

/// Supported pattern subset: literals, escaped literals, '.', groups,
/// alternation, positive character classes with ranges, and the quantifiers
/// ? * + {n} {m,n} {m,}. Unbounded repetition is capped at 10.
struct Pattern;
using PatternPtr = std::shared_ptr<const Pattern>;

struct Pattern {
  enum class Kind { Alternation, Concat, Class, Literal, Repeat };
  Kind kind = Kind::Literal;
  std::vector<PatternPtr> children;  // Alternation / Concat
  std::string char_set;             // Class (expanded, sorted, unique)
  char literal = 0;                 // Literal
  PatternPtr inner;                 // Repeat
  int min = 0;
  int max = 0;
};

PatternPtr parse_pattern(std::string_view pattern);

std::string sample(const Pattern& p, Rng& rng);

}  // namespace regex

/// Draws a string matching `pattern`; deterministic for a given rng state.
std::string sample_regex(std::string_view pattern, Rng& rng);

/// Body generation from a schema: database-generated properties become
/// Generated markers, strings come from their regex or a random string,
/// integers honor their minimum, arrays are always empty, objects recurse.
JsonValue generate_from_schema(const SchemaDef& schema, const ApiSpec& spec, Rng& rng);

JsonValue generate_url_param(const ParamSpec& param, Rng& rng);

/// Test data for one operation: POST/PUT get a body from the body schema,
/// GET/DELETE get an object mapping each parameter name to a value.
JsonValue generate(const OperationSpec& op, const ApiSpec& spec, Rng& rng);

std::string random_plain_string(Rng& rng);

std::int64_t random_positive_int(Rng& rng, std::int64_t minimum = 1);

}  // namespace petit
