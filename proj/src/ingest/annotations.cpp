#include "moocaug/ingest/annotations.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "moocaug/common/canonical_json.hpp"
#include "moocaug/ingest/errors.hpp"

namespace moocaug::ingest {
namespace {

constexpr double kClampTolerance = 1e-6;
constexpr std::string_view kSchemaName = "moocaug-annotations";

[[noreturn]] void violation(const std::string& path, const std::string& what) {
  throw IngestError(IngestErrc::kSchemaViolation, path + ": " + what, 0, path);
}

void reject_unknown_keys(const Json& obj, const std::string& path,
                         std::initializer_list<std::string_view> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      violation(path + "/" + it.key(), "unknown field");
    }
  }
}

const Json& require(const Json& obj, const std::string& path, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) violation(path + "/" + key, "missing required field");
  return *it;
}

double number(const Json& v, const std::string& path) {
  if (!v.is_number()) violation(path, "expected a number");
  return v.get<double>();
}

double snap(double v, const std::string& path) {
  if (v < -kClampTolerance || v > 1 + kClampTolerance) violation(path, "outside [0, 1]");
  return std::clamp(v, 0.0, 1.0);
}

BBox parse_bbox(const Json& v, const std::string& path, double sx, double sy) {
  if (!v.is_object()) violation(path, "expected an object");
  reject_unknown_keys(v, path, {"x", "y", "w", "h"});
  BBox b;
  b.x = snap(number(require(v, path, "x"), path + "/x") / sx, path + "/x");
  b.y = snap(number(require(v, path, "y"), path + "/y") / sy, path + "/y");
  b.w = snap(number(require(v, path, "w"), path + "/w") / sx, path + "/w");
  b.h = snap(number(require(v, path, "h"), path + "/h") / sy, path + "/h");
  if (b.w <= 0) violation(path + "/w", "width must be positive");
  if (b.h <= 0) violation(path + "/h", "height must be positive");
  if (b.x + b.w > 1 + kClampTolerance) violation(path + "/w", "x + w exceeds 1");
  if (b.y + b.h > 1 + kClampTolerance) violation(path + "/h", "y + h exceeds 1");
  b.w = std::min(b.w, 1 - b.x);
  b.h = std::min(b.h, 1 - b.y);
  return b;
}

AnnotationEntry parse_entry(const Json& v, const std::string& path, double sx, double sy) {
  if (!v.is_object()) violation(path, "expected an object");
  reject_unknown_keys(v, path, {"t_range_ms", "kind", "bbox", "text", "flags"});
  AnnotationEntry e;

  const auto& tr = require(v, path, "t_range_ms");
  if (!tr.is_array() || tr.size() != 2 || !tr[0].is_number_integer() || !tr[1].is_number_integer()) {
    violation(path + "/t_range_ms", "expected [start_ms, end_ms] integers");
  }
  e.t_range = {tr[0].get<std::int64_t>(), tr[1].get<std::int64_t>()};
  if (e.t_range.start_ms < 0) violation(path + "/t_range_ms/0", "negative start");
  if (e.t_range.end_ms <= e.t_range.start_ms) violation(path + "/t_range_ms/1", "end not after start");

  if (const auto it = v.find("kind"); it != v.end() && !it->is_null()) {
    if (!it->is_string()) violation(path + "/kind", "expected a string");
    e.kind_hint = parse_element_kind(it->get<std::string>());
    if (!e.kind_hint) violation(path + "/kind", "unknown kind '" + it->get<std::string>() + "'");
  }
  e.bbox = parse_bbox(require(v, path, "bbox"), path + "/bbox", sx, sy);
  if (const auto it = v.find("text"); it != v.end() && !it->is_null()) {
    if (!it->is_string()) violation(path + "/text", "expected a string");
    e.text = it->get<std::string>();
  }
  if (const auto it = v.find("flags"); it != v.end()) {
    const auto fpath = path + "/flags";
    if (!it->is_object()) violation(fpath, "expected an object");
    reject_unknown_keys(*it, fpath, {"handwritten", "teacher_head"});
    for (const auto* key : {"handwritten", "teacher_head"}) {
      const auto f = it->find(key);
      if (f == it->end()) continue;
      if (!f->is_boolean()) violation(fpath + "/" + key, "expected a boolean");
      (std::string_view(key) == "handwritten" ? e.flags.handwritten : e.flags.teacher_head) = f->get<bool>();
    }
  }
  return e;
}

}  // namespace

AnnotationSet parse_annotations(std::string_view json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw IngestError(IngestErrc::kSchemaViolation, std::string("invalid JSON: ") + e.what(), 0, "");
  }
  if (!doc.is_object()) violation("", "document must be an object");
  reject_unknown_keys(doc, "", {"schema", "version", "units", "frame_size", "entries", "course_id"});
  if (const auto it = doc.find("schema"); it != doc.end() && *it != std::string(kSchemaName)) {
    violation("/schema", "expected \"moocaug-annotations\"");
  }
  const auto& version = require(doc, "", "version");
  if (version != 1) violation("/version", "unsupported version");

  double sx = 1;
  double sy = 1;
  std::string units = "normalized";
  if (const auto it = doc.find("units"); it != doc.end()) {
    if (!it->is_string()) violation("/units", "expected a string");
    units = it->get<std::string>();
  }
  if (units == "pixels") {
    const auto& fs = require(doc, "", "frame_size");
    if (!fs.is_object()) violation("/frame_size", "expected an object");
    sx = number(require(fs, "/frame_size", "width"), "/frame_size/width");
    sy = number(require(fs, "/frame_size", "height"), "/frame_size/height");
    if (sx <= 0) violation("/frame_size/width", "must be positive");
    if (sy <= 0) violation("/frame_size/height", "must be positive");
  } else if (units != "normalized") {
    violation("/units", "expected \"normalized\" or \"pixels\"");
  }

  const auto& entries = require(doc, "", "entries");
  if (!entries.is_array()) violation("/entries", "expected an array");
  AnnotationSet set;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    set.entries.push_back(parse_entry(entries[i], "/entries/" + std::to_string(i), sx, sy));
  }
  return set;
}

AnnotationSet load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(IngestErrc::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_annotations(ss.str());
}

std::string serialize_annotations(const AnnotationSet& set) {
  Json entries = Json::array();
  for (const auto& e : set.entries) {
    Json j;
    j["t_range_ms"] = {e.t_range.start_ms, e.t_range.end_ms};
    if (e.kind_hint) j["kind"] = std::string(to_string(*e.kind_hint));
    j["bbox"] = {{"x", e.bbox.x}, {"y", e.bbox.y}, {"w", e.bbox.w}, {"h", e.bbox.h}};
    if (e.text) j["text"] = *e.text;
    j["flags"] = {{"handwritten", e.flags.handwritten}, {"teacher_head", e.flags.teacher_head}};
    entries.push_back(std::move(j));
  }
  Json doc = {{"schema", kSchemaName}, {"version", 1}, {"units", "normalized"}, {"entries", entries}};
  return doc.dump(2) + "\n";
}

}  // namespace moocaug::ingest
