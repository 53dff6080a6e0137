#pragma once

// Byte-stable JSON output: object keys sorted, two-space indentation, floats
// in shortest round-trip decimal form.

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <string>

#include "tickbound/error.hpp"

namespace tickbound {

using Json = nlohmann::json;

/// Shortest decimal that parses back to exactly `x`.
[[nodiscard]] inline std::string format_double(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::invalid_stats, "cannot serialize a non-finite number");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, res.ptr);
  // Keep floats visibly floating point so readers do not narrow them to integers.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

namespace detail {

inline void dump_canonical(const Json& j, std::string& out, int depth) {
  const auto indent = [&](int d) { out.append(static_cast<std::size_t>(2 * d), ' '); };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      // nlohmann::json objects are std::map-backed, so iteration is key-sorted.
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        indent(depth + 1);
        out += Json(it.key()).dump();
        out += ": ";
        dump_canonical(it.value(), out, depth + 1);
      }
      out += "\n";
      indent(depth);
      out += "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        indent(depth + 1);
        dump_canonical(j[i], out, depth + 1);
      }
      out += "\n";
      indent(depth);
      out += "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

[[nodiscard]] inline std::string to_canonical_json(const Json& j) {
  std::string out;
  detail::dump_canonical(j, out, 0);
  out += "\n";
  return out;
}

/// Single-line canonical form (for JSON Lines output).
[[nodiscard]] inline std::string to_canonical_json_line(const Json& j) {
  std::string out;
  switch (j.type()) {
    case Json::value_t::object: {
      out += "{";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",";
        first = false;
        out += Json(it.key()).dump();
        out += ":";
        out += to_canonical_json_line(it.value());
      }
      out += "}";
      return out;
    }
    case Json::value_t::array: {
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",";
        out += to_canonical_json_line(j[i]);
      }
      out += "]";
      return out;
    }
    case Json::value_t::number_float: return format_double(j.get<double>());
    default: return j.dump();
  }
}

}  // namespace tickbound
