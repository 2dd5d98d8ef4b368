#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace petit {

/// JSON tree used for request/response bodies, pool entries and comparison
/// semantics. Objects keep insertion order. A dedicated Generated variant
/// marks database-generated properties before the service assigns them; it
/// is never serialized (the property is omitted from the wire form).
class JsonValue {
 public:
  struct Null {
    bool operator==(const Null&) const = default;
  };
  struct Generated {
    bool operator==(const Generated&) const = default;
  };
  using Array = std::vector<JsonValue>;
  using Member = std::pair<std::string, JsonValue>;
  using Object = std::vector<Member>;
  using Storage =
      std::variant<Null, bool, std::int64_t, double, std::string, Array, Object, Generated>;

  JsonValue() : value_(Null{}) {}
  explicit JsonValue(Storage v) : value_(std::move(v)) {}

  static JsonValue null() { return JsonValue{Storage{Null{}}}; }
  static JsonValue generated() { return JsonValue{Storage{Generated{}}}; }
  static JsonValue boolean(bool b) { return JsonValue{Storage{b}}; }
  static JsonValue integer(std::int64_t n) { return JsonValue{Storage{n}}; }
  static JsonValue real(double d) { return JsonValue{Storage{d}}; }
  static JsonValue str(std::string s) { return JsonValue{Storage{std::move(s)}}; }
  static JsonValue array(Array a = {}) { return JsonValue{Storage{std::move(a)}}; }
  static JsonValue object(Object o = {}) { return JsonValue{Storage{std::move(o)}}; }

  bool is_null() const { return std::holds_alternative<Null>(value_); }
  bool is_generated() const { return std::holds_alternative<Generated>(value_); }
  bool is_bool() const { return std::holds_alternative<bool>(value_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(value_); }
  bool is_real() const { return std::holds_alternative<double>(value_); }
  bool is_number() const { return is_int() || is_real(); }
  bool is_string() const { return std::holds_alternative<std::string>(value_); }
  bool is_array() const { return std::holds_alternative<Array>(value_); }
  bool is_object() const { return std::holds_alternative<Object>(value_); }

  bool as_bool() const { return std::get<bool>(value_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(value_); }
  double as_real() const { return std::get<double>(value_); }
  const std::string& as_string() const { return std::get<std::string>(value_); }
  const Array& as_array() const { return std::get<Array>(value_); }
  Array& as_array() { return std::get<Array>(value_); }
  const Object& as_object() const { return std::get<Object>(value_); }
  Object& as_object() { return std::get<Object>(value_); }

  /// Numeric view used by comparison semantics: ints stay exact, reals widen.
  std::optional<double> as_number() const {
    if (is_int()) return static_cast<double>(as_int());
    if (is_real()) return as_real();
    return std::nullopt;
  }

  const JsonValue* find(std::string_view key) const;
  void set(std::string key, JsonValue v);

  bool operator==(const JsonValue& other) const;

  const Storage& storage() const { return value_; }

 private:
  Storage value_;
};

/// Parses a JSON text into a JsonValue (object member order preserved).
/// Returns nullopt when the text is not valid JSON.
std::optional<JsonValue> parse_json(std::string_view text);

/// Compact wire form. Generated members are omitted; a bare Generated value
/// serializes as null.
std::string to_wire(const JsonValue& v);

/// Human-readable form for verbose reports. Arrays longer than
/// `max_array_elems` are cut with an elision marker; pass a negative value
/// for no truncation.
std::string to_display(const JsonValue& v, int max_array_elems = -1);

/// Deep structural equality with database-generated masking: object members
/// where either side holds a Generated marker are skipped on both sides.
/// Object member order is irrelevant.
bool masked_equals(const JsonValue& a, const JsonValue& b);

}  // namespace petit
