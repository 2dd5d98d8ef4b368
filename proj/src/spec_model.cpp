#include "petit/spec_model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "petit/apostl_parser.hpp"

namespace petit {

namespace {

using nlohmann::ordered_json;
using apostl::HttpMethod;

[[noreturn]] void fail(SpecError::Kind kind, const std::string& message) {
  throw SpecError(kind, message);
}

std::vector<PathSegment> split_path(const std::string& path) {
  std::vector<PathSegment> out;
  std::size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '/') {
      ++i;
      continue;
    }
    std::size_t j = path.find('/', i);
    if (j == std::string::npos) j = path.size();
    std::string piece = path.substr(i, j - i);
    PathSegment seg;
    if (piece.size() >= 2 && piece.front() == '{' && piece.back() == '}') {
      seg.is_param = true;
      seg.text = piece.substr(1, piece.size() - 2);
    } else {
      seg.text = piece;
    }
    out.push_back(std::move(seg));
    i = j;
  }
  return out;
}

std::optional<HttpMethod> method_from_key(const std::string& key) {
  if (key == "get") return HttpMethod::Get;
  if (key == "post") return HttpMethod::Post;
  if (key == "put") return HttpMethod::Put;
  if (key == "delete") return HttpMethod::Delete;
  return std::nullopt;
}

std::string ref_target(const ordered_json& schema_node) {
  // {"$ref": "#/components/schemas/player"} -> "player"
  if (!schema_node.is_object() || !schema_node.contains("$ref")) return "";
  const std::string ref = schema_node["$ref"].get<std::string>();
  const std::string prefix = "#/components/schemas/";
  if (ref.rfind(prefix, 0) != 0) {
    fail(SpecError::Kind::UnresolvedRef, "unsupported $ref '" + ref + "'");
  }
  return ref.substr(prefix.size());
}

apostl::Formula parse_contract(const std::string& text, const std::string& where) {
  apostl::Formula f = [&] {
    try {
      return apostl::parse_formula(text);
    } catch (const apostl::SyntaxError& e) {
      fail(SpecError::Kind::ContractParseError,
           where + ": cannot parse formula \"" + text + "\": " + e.what());
    }
  }();
  auto violations = apostl::check_restrictions(f);
  if (!violations.empty()) {
    std::string msg = where + ": formula \"" + text + "\" violates restrictions:";
    for (const auto& v : violations) msg += " [" + apostl::to_string(v.kind) + "] " + v.detail;
    fail(SpecError::Kind::RestrictionViolation, msg);
  }
  return f;
}

std::vector<apostl::Formula> parse_contract_list(const ordered_json& node, const char* key,
                                                 const std::string& where) {
  std::vector<apostl::Formula> out;
  if (!node.contains(key)) return out;
  const ordered_json& list = node[key];
  if (!list.is_array()) {
    fail(SpecError::Kind::MalformedDocument, where + ": " + key + " must be an array of strings");
  }
  for (const auto& item : list) {
    if (!item.is_string()) {
      fail(SpecError::Kind::MalformedDocument, where + ": " + key + " entries must be strings");
    }
    out.push_back(parse_contract(item.get<std::string>(), where));
  }
  return out;
}

ParamSpec load_parameter(const ordered_json& node, const std::string& where) {
  ParamSpec p;
  if (!node.contains("name")) {
    fail(SpecError::Kind::MalformedDocument, where + ": parameter without a name");
  }
  p.name = node["name"].get<std::string>();
  if (!node.contains("schema")) {
    fail(SpecError::Kind::MalformedDocument, where + ": parameter '" + p.name + "' has no schema");
  }
  const ordered_json& schema = node["schema"];
  const std::string type = schema.value("type", "string");
  if (type == "string") {
    p.kind = ParamKind::String;
    if (schema.contains("x-regex")) p.regex = schema["x-regex"].get<std::string>();
  } else if (type == "integer") {
    p.kind = ParamKind::Integer;
    if (schema.contains("minimum")) p.minimum = schema["minimum"].get<std::int64_t>();
  } else {
    fail(SpecError::Kind::MalformedDocument,
         where + ": parameter '" + p.name + "' must be string or integer");
  }
  return p;
}

PropertyKind property_kind(const std::string& type, const std::string& where) {
  if (type == "string") return PropertyKind::String;
  if (type == "integer") return PropertyKind::Integer;
  if (type == "number") return PropertyKind::Number;
  if (type == "array") return PropertyKind::Array;
  if (type == "object") return PropertyKind::Object;
  fail(SpecError::Kind::MalformedDocument, where + ": unsupported property type '" + type + "'");
}

SchemaDef load_schema(const std::string& name, const ordered_json& node) {
  SchemaDef def;
  def.name = name;
  const std::string where = "schema '" + name + "'";
  if (node.contains("required")) {
    for (const auto& r : node["required"]) def.required.insert(r.get<std::string>());
  }
  if (node.contains("properties")) {
    for (const auto& [prop_name, prop_node] : node["properties"].items()) {
      PropertySpec prop;
      prop.name = prop_name;
      if (prop_node.contains("$ref")) {
        prop.kind = PropertyKind::Object;
        prop.nested = ref_target(prop_node);
      } else {
        prop.kind = property_kind(prop_node.value("type", "string"), where);
      }
      if (prop_node.contains("x-regex")) prop.regex = prop_node["x-regex"].get<std::string>();
      if (prop_node.contains("minimum")) prop.minimum = prop_node["minimum"].get<std::int64_t>();
      prop.db_generated = prop_node.value("readOnly", false);
      if (prop.db_generated &&
          prop.kind != PropertyKind::String && prop.kind != PropertyKind::Integer) {
        fail(SpecError::Kind::MalformedDocument,
             where + ": readOnly is only supported for string and integer properties");
      }
      if (prop.kind == PropertyKind::Array && prop_node.contains("items")) {
        const std::string target = ref_target(prop_node["items"]);
        if (!target.empty()) prop.nested = target;
      }
      def.properties.push_back(std::move(prop));
    }
  }
  return def;
}

std::optional<std::string> body_schema_of(const ordered_json& op_node, const std::string& where) {
  if (!op_node.contains("requestBody")) return std::nullopt;
  const ordered_json& rb = op_node["requestBody"];
  if (!rb.contains("content")) return std::nullopt;
  const ordered_json& content = rb["content"];
  if (!content.contains("application/json")) {
    fail(SpecError::Kind::MalformedDocument, where + ": only application/json bodies are supported");
  }
  const ordered_json& media = content["application/json"];
  if (!media.contains("schema")) return std::nullopt;
  const std::string target = ref_target(media["schema"]);
  if (target.empty()) {
    fail(SpecError::Kind::MalformedDocument, where + ": request body schema must be a $ref");
  }
  return target;
}

}  // namespace

OpCategory category_of(HttpMethod method) {
  switch (method) {
    case HttpMethod::Post: return OpCategory::Constructor;
    case HttpMethod::Put:
    case HttpMethod::Delete: return OpCategory::Mutator;
    case HttpMethod::Get: return OpCategory::Observer;
  }
  return OpCategory::Observer;
}

const PropertySpec* SchemaDef::find_property(std::string_view prop) const {
  for (const auto& p : properties) {
    if (p.name == prop) return &p;
  }
  return nullptr;
}

const ParamSpec* OperationSpec::find_parameter(std::string_view name) const {
  for (const auto& p : parameters) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::string OperationSpec::display_path() const {
  std::string out;
  for (const auto& seg : path_template) {
    out += "/";
    out += seg.is_param ? "{" + seg.text + "}" : seg.text;
  }
  return out;
}

std::string OperationSpec::display_name() const {
  return apostl::to_string(method) + " " + display_path();
}

const SchemaDef* ApiSpec::find_schema(std::string_view name) const {
  auto it = schemas.find(std::string(name));
  return it == schemas.end() ? nullptr : &it->second;
}

const SchemaDef* ApiSpec::schema_for_id(std::string_view param_name) const {
  for (const auto& [name, schema] : schemas) {
    if (schema.id_property == param_name) return &schema;
  }
  return nullptr;
}

ApiSpec load_spec(std::string_view document) {
  ordered_json doc = ordered_json::parse(document, nullptr, false);
  if (doc.is_discarded()) {
    fail(SpecError::Kind::MalformedDocument,
         "input is not valid JSON (note: only JSON OAS documents are supported, not YAML)");
  }
  if (!doc.is_object()) {
    fail(SpecError::Kind::MalformedDocument, "top-level document must be a JSON object");
  }

  ApiSpec spec;
  if (doc.contains("info")) {
    spec.title = doc["info"].value("title", "");
    spec.version = doc["info"].value("version", "");
  }
  if (doc.contains("servers") && doc["servers"].is_array() && !doc["servers"].empty()) {
    spec.base_url = doc["servers"][0].value("url", "");
  }
  const bool http = spec.base_url.rfind("http://", 0) == 0;
  const bool https = spec.base_url.rfind("https://", 0) == 0;
  if ((!http && !https) || spec.base_url.size() <= (http ? 7u : 8u)) {
    fail(SpecError::Kind::MalformedDocument,
         "the first servers entry must be an absolute http(s) URL");
  }
  while (spec.base_url.back() == '/') spec.base_url.pop_back();

  if (doc.contains("components") && doc["components"].contains("schemas")) {
    for (const auto& [name, node] : doc["components"]["schemas"].items()) {
      spec.schemas.emplace(name, load_schema(name, node));
    }
  }

  // collect paths first: id-property detection needs the full placeholder set
  std::vector<std::pair<std::string, const ordered_json*>> path_items;
  std::set<std::string> all_placeholders;
  if (doc.contains("paths")) {
    for (const auto& [path, node] : doc["paths"].items()) {
      path_items.emplace_back(path, &node);
      for (const auto& seg : split_path(path)) {
        if (seg.is_param) all_placeholders.insert(seg.text);
      }
    }
  }

  // id property: first required property used as a path placeholder, else the
  // first required property
  for (auto& [name, schema] : spec.schemas) {
    for (const auto& prop : schema.properties) {
      if (!schema.required.count(prop.name)) continue;
      if (all_placeholders.count(prop.name)) {
        schema.id_property = prop.name;
        break;
      }
      if (schema.id_property.empty()) schema.id_property = prop.name;
    }
    if (schema.id_property.empty()) {
      fail(SpecError::Kind::MalformedDocument,
           "schema '" + name + "' has no required properties to identify it by");
    }
  }

  // different resources must have different ID names
  std::map<std::string, std::string> id_owner;
  for (const auto& [name, schema] : spec.schemas) {
    auto [it, inserted] = id_owner.emplace(schema.id_property, name);
    if (!inserted) {
      fail(SpecError::Kind::DuplicateIdProperty,
           "schemas '" + it->second + "' and '" + name + "' share the ID property '" +
               schema.id_property + "'");
    }
  }

  auto group_index = [&spec](const std::string& group_name) {
    for (std::size_t i = 0; i < spec.apis.size(); ++i) {
      if (spec.apis[i].name == group_name) return i;
    }
    spec.apis.push_back(ApiGroup{group_name, {}, {}});
    return spec.apis.size() - 1;
  };

  for (const auto& [path, node_ptr] : path_items) {
    const ordered_json& node = *node_ptr;
    auto segments = split_path(path);
    if (segments.empty() || segments[0].is_param) {
      fail(SpecError::Kind::MalformedDocument,
           "path '" + path + "' must start with a literal segment");
    }
    const std::size_t gi = group_index(segments[0].text);

    // invariants may sit on any path item of the group; they are unioned
    for (auto& inv : parse_contract_list(node, "x-invariants", "path '" + path + "'")) {
      spec.apis[gi].invariants.push_back(std::move(inv));
    }

    for (const auto& [key, op_node] : node.items()) {
      auto method = method_from_key(key);
      if (!method) continue;  // x- keys and non-operation fields
      const std::string where = apostl::to_string(*method) + " " + path;
      OperationSpec op;
      op.method = *method;
      op.category = category_of(*method);
      op.path_template = segments;
      op.preconditions = parse_contract_list(op_node, "x-requires", where);
      op.postconditions = parse_contract_list(op_node, "x-ensures", where);
      if (op_node.contains("parameters")) {
        for (const auto& pn : op_node["parameters"]) {
          op.parameters.push_back(load_parameter(pn, where));
        }
      }
      op.body_schema = body_schema_of(op_node, where);
      if (op.body_schema && !spec.schemas.count(*op.body_schema)) {
        fail(SpecError::Kind::UnresolvedRef,
             where + ": request body references unknown schema '" + *op.body_schema + "'");
      }
      for (const auto& seg : op.path_template) {
        if (seg.is_param && op.find_parameter(seg.text) == nullptr) {
          fail(SpecError::Kind::MalformedDocument,
               where + ": path parameter '" + seg.text + "' has no parameter entry");
        }
      }
      spec.apis[gi].operations.push_back(std::move(op));
    }
  }

  // nested schema references resolve
  for (const auto& [name, schema] : spec.schemas) {
    for (const auto& prop : schema.properties) {
      if (prop.nested && !spec.schemas.count(*prop.nested)) {
        fail(SpecError::Kind::UnresolvedRef,
             "schema '" + name + "' property '" + prop.name + "' references unknown schema '" +
                 *prop.nested + "'");
      }
    }
  }

  return spec;
}

ApiSpec load_spec_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(SpecError::Kind::MalformedDocument, "cannot open specification file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_spec(buffer.str());
}

}  // namespace petit
