#include "moocaug/manifest/json_schema.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace moocaug::manifest {
namespace {

bool is_integral(const Json& v) {
  if (v.is_number_integer()) return true;
  if (!v.is_number_float()) return false;
  const double d = v.get<double>();
  return std::isfinite(d) && d == std::floor(d);
}

bool has_type(const Json& v, std::string_view type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "number") return v.is_number();
  if (type == "integer") return is_integral(v);
  return false;
}

std::string escape_pointer(const std::string& key) {
  std::string out;
  for (const char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

std::string short_dump(const Json& v) {
  auto s = v.dump();
  if (s.size() > 40) s = s.substr(0, 37) + "...";
  return s;
}

}  // namespace

std::vector<SchemaViolation> JsonSchema::validate(const Json& instance) const {
  std::vector<SchemaViolation> out;
  check(root_, instance, "", out);
  return out;
}

const Json& JsonSchema::resolve(const std::string& ref) const {
  constexpr std::string_view kPrefix = "#/$defs/";
  if (ref.rfind(kPrefix, 0) != 0) throw std::invalid_argument("unsupported $ref " + ref);
  return root_.at("$defs").at(ref.substr(kPrefix.size()));
}

void JsonSchema::check(const Json& schema, const Json& v, const std::string& path,
                       std::vector<SchemaViolation>& out) const {
  if (!schema.is_object()) return;
  const auto fail = [&](std::string message) { out.push_back({path.empty() ? "/" : path, std::move(message)}); };

  if (const auto it = schema.find("$ref"); it != schema.end()) check(resolve(it->get<std::string>()), v, path, out);

  if (const auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    if (it->is_string()) ok = has_type(v, it->get<std::string>());
    else
      for (const auto& t : *it) ok = ok || has_type(v, t.get<std::string>());
    if (!ok) {
      fail("expected type " + it->dump() + ", found " + short_dump(v));
      return;
    }
  }
  if (const auto it = schema.find("enum"); it != schema.end()) {
    if (std::find(it->begin(), it->end(), v) == it->end()) fail("value " + short_dump(v) + " not in " + it->dump());
  }
  if (const auto it = schema.find("const"); it != schema.end()) {
    if (*it != v) fail("expected " + it->dump() + ", found " + short_dump(v));
  }
  if (const auto it = schema.find("anyOf"); it != schema.end()) {
    bool any = false;
    for (const auto& alt : *it) {
      std::vector<SchemaViolation> scratch;
      check(alt, v, path, scratch);
      if (scratch.empty()) {
        any = true;
        break;
      }
    }
    if (!any) fail("matches none of the allowed alternatives");
  }

  if (v.is_number()) {
    const double d = v.get<double>();
    if (auto it = schema.find("minimum"); it != schema.end() && d < it->get<double>())
      fail(short_dump(v) + " < minimum " + it->dump());
    if (auto it = schema.find("maximum"); it != schema.end() && d > it->get<double>())
      fail(short_dump(v) + " > maximum " + it->dump());
    if (auto it = schema.find("exclusiveMinimum"); it != schema.end() && d <= it->get<double>())
      fail(short_dump(v) + " <= exclusive minimum " + it->dump());
    if (auto it = schema.find("exclusiveMaximum"); it != schema.end() && d >= it->get<double>())
      fail(short_dump(v) + " >= exclusive maximum " + it->dump());
  }
  if (v.is_string()) {
    if (auto it = schema.find("minLength"); it != schema.end() && v.get_ref<const std::string&>().size() < it->get<std::size_t>())
      fail("string shorter than " + it->dump());
  }

  if (v.is_object()) {
    if (const auto it = schema.find("required"); it != schema.end()) {
      for (const auto& key : *it)
        if (!v.contains(key.get<std::string>())) fail("missing required member \"" + key.get<std::string>() + "\"");
    }
    const auto props = schema.find("properties");
    const auto extra = schema.find("additionalProperties");
    for (const auto& [key, member] : v.items()) {
      const auto sub = path + "/" + escape_pointer(key);
      if (props != schema.end() && props->contains(key)) {
        check(props->at(key), member, sub, out);
      } else if (extra != schema.end()) {
        if (extra->is_boolean() && !extra->get<bool>()) out.push_back({sub, "unexpected member"});
        else check(*extra, member, sub, out);
      }
    }
  }

  if (v.is_array()) {
    if (auto it = schema.find("minItems"); it != schema.end() && v.size() < it->get<std::size_t>())
      fail("fewer than " + it->dump() + " items");
    if (auto it = schema.find("maxItems"); it != schema.end() && v.size() > it->get<std::size_t>())
      fail("more than " + it->dump() + " items");
    std::size_t first_free = 0;
    if (const auto it = schema.find("prefixItems"); it != schema.end()) {
      for (std::size_t i = 0; i < it->size() && i < v.size(); ++i) check((*it)[i], v[i], path + "/" + std::to_string(i), out);
      first_free = it->size();
    }
    if (const auto it = schema.find("items"); it != schema.end()) {
      for (std::size_t i = first_free; i < v.size(); ++i) check(*it, v[i], path + "/" + std::to_string(i), out);
    }
  }
}

const JsonSchema& manifest_schema() {
  static const JsonSchema schema(Json::parse(manifest_schema_text()));
  return schema;
}

}  // namespace moocaug::manifest
