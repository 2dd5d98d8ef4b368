#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "petit/apostl_ast.hpp"

namespace petit {

enum class OpCategory { Constructor, Mutator, Observer };

OpCategory category_of(apostl::HttpMethod method);

enum class ParamKind { String, Integer };

struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::String;
  std::optional<std::string> regex;     // string parameters
  std::optional<std::int64_t> minimum;  // integer parameters
};

enum class PropertyKind { String, Integer, Number, Array, Object };

struct PropertySpec {
  std::string name;
  PropertyKind kind = PropertyKind::String;
  std::optional<std::string> regex;
  std::optional<std::int64_t> minimum;
  bool db_generated = false;            // readOnly in the document
  std::optional<std::string> nested;    // schema name for object / array items
};

struct SchemaDef {
  std::string name;
  std::string id_property;
  std::vector<PropertySpec> properties;
  std::set<std::string> required;

  const PropertySpec* find_property(std::string_view prop) const;
};

/// One path segment of an operation template: literal text or {paramName}.
struct PathSegment {
  bool is_param = false;
  std::string text;  // literal text or the parameter name
};

struct OperationSpec {
  apostl::HttpMethod method = apostl::HttpMethod::Get;
  std::vector<PathSegment> path_template;
  OpCategory category = OpCategory::Observer;
  std::vector<ParamSpec> parameters;
  std::optional<std::string> body_schema;
  std::vector<apostl::Formula> preconditions;
  std::vector<apostl::Formula> postconditions;

  const ParamSpec* find_parameter(std::string_view name) const;
  std::string display_path() const;  // "/players/{playerNIF}"
  std::string display_name() const;  // "DELETE /players/{playerNIF}"
};

struct ApiGroup {
  std::string name;  // first path segment, e.g. "players"
  std::vector<apostl::Formula> invariants;
  std::vector<OperationSpec> operations;
};

struct ApiSpec {
  std::string title;
  std::string version;
  std::string base_url;
  std::vector<ApiGroup> apis;
  std::map<std::string, SchemaDef> schemas;

  const SchemaDef* find_schema(std::string_view name) const;
  /// Schema whose id_property equals `param_name`; ID names are globally
  /// unique so at most one exists.
  const SchemaDef* schema_for_id(std::string_view param_name) const;
};

class SpecError : public std::runtime_error {
 public:
  enum class Kind {
    MalformedDocument,
    UnresolvedRef,
    ContractParseError,
    RestrictionViolation,
    DuplicateIdProperty,
  };

  SpecError(Kind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Loads an extended OpenAPI JSON document into the internal model.
/// Operations are grouped by first path segment in document order; contracts
/// are parsed and restriction-checked, so a returned ApiSpec only ever holds
/// valid formulas.
ApiSpec load_spec(std::string_view document);

ApiSpec load_spec_file(const std::string& path);

}  // namespace petit
