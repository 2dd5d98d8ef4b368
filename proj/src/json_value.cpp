#include "petit/json_value.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace petit {

namespace {

using nlohmann::ordered_json;

JsonValue from_nlohmann(const ordered_json& j) {
  switch (j.type()) {
    case ordered_json::value_t::null:
      return JsonValue::null();
    case ordered_json::value_t::boolean:
      return JsonValue::boolean(j.get<bool>());
    case ordered_json::value_t::number_integer:
      return JsonValue::integer(j.get<std::int64_t>());
    case ordered_json::value_t::number_unsigned:
      return JsonValue::integer(static_cast<std::int64_t>(j.get<std::uint64_t>()));
    case ordered_json::value_t::number_float:
      return JsonValue::real(j.get<double>());
    case ordered_json::value_t::string:
      return JsonValue::str(j.get<std::string>());
    case ordered_json::value_t::array: {
      JsonValue::Array a;
      a.reserve(j.size());
      for (const auto& e : j) a.push_back(from_nlohmann(e));
      return JsonValue::array(std::move(a));
    }
    case ordered_json::value_t::object: {
      JsonValue::Object o;
      o.reserve(j.size());
      for (const auto& [k, v] : j.items()) o.emplace_back(k, from_nlohmann(v));
      return JsonValue::object(std::move(o));
    }
    default:
      return JsonValue::null();
  }
}

ordered_json to_nlohmann(const JsonValue& v) {
  ordered_json out;
  std::visit(
      [&](const auto& alt) {
        using T = std::decay_t<decltype(alt)>;
        if constexpr (std::is_same_v<T, JsonValue::Null>) {
          out = nullptr;
        } else if constexpr (std::is_same_v<T, JsonValue::Generated>) {
          out = nullptr;
        } else if constexpr (std::is_same_v<T, bool>) {
          out = alt;
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          out = alt;
        } else if constexpr (std::is_same_v<T, double>) {
          out = alt;
        } else if constexpr (std::is_same_v<T, std::string>) {
          out = alt;
        } else if constexpr (std::is_same_v<T, JsonValue::Array>) {
          out = ordered_json::array();
          for (const auto& e : alt) out.push_back(to_nlohmann(e));
        } else if constexpr (std::is_same_v<T, JsonValue::Object>) {
          out = ordered_json::object();
          for (const auto& [k, m] : alt) {
            if (m.is_generated()) continue;  // server-assigned, never sent
            out[k] = to_nlohmann(m);
          }
        }
      },
      v.storage());
  return out;
}

void display_rec(const JsonValue& v, int max_elems, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  std::visit(
      [&](const auto& alt) {
        using T = std::decay_t<decltype(alt)>;
        if constexpr (std::is_same_v<T, JsonValue::Array>) {
          if (alt.empty()) {
            out += "[]";
            return;
          }
          out += "[\n";
          std::size_t limit = alt.size();
          if (max_elems >= 0 && static_cast<std::size_t>(max_elems) < limit) {
            limit = static_cast<std::size_t>(max_elems);
          }
          for (std::size_t i = 0; i < limit; ++i) {
            out += pad_in;
            display_rec(alt[i], max_elems, indent + 1, out);
            if (i + 1 < alt.size()) out += ",";
            out += "\n";
          }
          if (limit < alt.size()) out += pad_in + "...\n";
          out += pad + "]";
        } else if constexpr (std::is_same_v<T, JsonValue::Object>) {
          if (alt.empty()) {
            out += "{}";
            return;
          }
          out += "{\n";
          for (std::size_t i = 0; i < alt.size(); ++i) {
            out += pad_in + "\"" + alt[i].first + "\": ";
            display_rec(alt[i].second, max_elems, indent + 1, out);
            if (i + 1 < alt.size()) out += ",";
            out += "\n";
          }
          out += pad + "}";
        } else {
          out += to_wire(v);
        }
      },
      v.storage());
}

}  // namespace

const JsonValue* JsonValue::find(std::string_view key) const {
  if (!is_object()) return nullptr;
  for (const auto& [k, v] : as_object()) {
    if (k == key) return &v;
  }
  return nullptr;
}

void JsonValue::set(std::string key, JsonValue v) {
  auto& obj = std::get<Object>(value_);
  for (auto& [k, m] : obj) {
    if (k == key) {
      m = std::move(v);
      return;
    }
  }
  obj.emplace_back(std::move(key), std::move(v));
}

bool JsonValue::operator==(const JsonValue& other) const {
  if (value_.index() != other.value_.index()) {
    // int/real cross-comparison stays numeric
    auto a = as_number();
    auto b = other.as_number();
    if (a && b) return *a == *b;
    return false;
  }
  if (is_object()) {
    const auto& a = as_object();
    const auto& b = other.as_object();
    if (a.size() != b.size()) return false;
    for (const auto& [k, v] : a) {
      const JsonValue* m = other.find(k);
      if (m == nullptr || !(v == *m)) return false;
    }
    return true;
  }
  return value_ == other.value_;
}

std::optional<JsonValue> parse_json(std::string_view text) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return from_nlohmann(j);
}

std::string to_wire(const JsonValue& v) { return to_nlohmann(v).dump(); }

std::string to_display(const JsonValue& v, int max_array_elems) {
  std::string out;
  display_rec(v, max_array_elems, 0, out);
  return out;
}

bool masked_equals(const JsonValue& a, const JsonValue& b) {
  if (a.is_generated() || b.is_generated()) return true;
  if (a.is_object() && b.is_object()) {
    const auto& ao = a.as_object();
    const auto& bo = b.as_object();
    auto masked = [&](std::string_view key) {
      const JsonValue* x = a.find(key);
      const JsonValue* y = b.find(key);
      return (x != nullptr && x->is_generated()) || (y != nullptr && y->is_generated());
    };
    for (const auto& [k, v] : ao) {
      if (masked(k)) continue;
      const JsonValue* m = b.find(k);
      if (m == nullptr || !masked_equals(v, *m)) return false;
    }
    for (const auto& [k, v] : bo) {
      if (masked(k)) continue;
      if (a.find(k) == nullptr) return false;
    }
    return true;
  }
  if (a.is_array() && b.is_array()) {
    const auto& aa = a.as_array();
    const auto& ba = b.as_array();
    if (aa.size() != ba.size()) return false;
    for (std::size_t i = 0; i < aa.size(); ++i) {
      if (!masked_equals(aa[i], ba[i])) return false;
    }
    return true;
  }
  return a == b;
}

}  // namespace petit
