#include "moocaug/common/canonical_json.hpp"

#include <cmath>
#include <cstdio>

#include "moocaug/common/error.hpp"

namespace moocaug {
namespace {

void indent(std::string& out, int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

void emit_float(std::string& out, double x) {
  if (!std::isfinite(x)) throw Error("canonical_dump: non-finite number");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  out += s;
}

void emit(std::string& out, const Json& v, int depth) {
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        indent(out, depth + 1);
        out += Json(it.key()).dump();
        out += ": ";
        emit(out, it.value(), depth + 1);
      }
      out += '\n';
      indent(out, depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ",\n";
        first = false;
        indent(out, depth + 1);
        emit(out, item, depth + 1);
      }
      out += '\n';
      indent(out, depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      emit_float(out, v.get<double>());
      return;
    default:
      out += v.dump(-1, ' ', false, Json::error_handler_t::strict);
      return;
  }
}

}  // namespace

std::string canonical_dump(const Json& value) {
  std::string out;
  emit(out, value, 0);
  out += '\n';
  return out;
}

double round6(double x) {
  const double r = std::round(x * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

}  // namespace moocaug
