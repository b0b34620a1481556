#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "moocaug/common/canonical_json.hpp"

namespace moocaug::manifest {

struct SchemaViolation {
  std::string path;  // JSON pointer into the instance
  std::string message;
};

// Validator for the JSON Schema subset the manifest schema uses: type,
// enum, const, $ref (local "#/$defs/..."), properties, required,
// additionalProperties, items, prefixItems, minItems, maxItems, minLength,
// minimum, maximum, exclusiveMinimum, exclusiveMaximum, anyOf. Unknown
// keywords are ignored, as the standard prescribes.
class JsonSchema {
 public:
  explicit JsonSchema(Json schema) : root_(std::move(schema)) {}

  std::vector<SchemaViolation> validate(const Json& instance) const;

 private:
  void check(const Json& schema, const Json& value, const std::string& path,
             std::vector<SchemaViolation>& out) const;
  const Json& resolve(const std::string& ref) const;

  Json root_;
};

// The shipped manifest schema (schema/manifest.schema.json).
std::string_view manifest_schema_text();
const JsonSchema& manifest_schema();

}  // namespace moocaug::manifest
