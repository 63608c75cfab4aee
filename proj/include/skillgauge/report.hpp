#pragma once

// Canonical MetricReport serialization. Reports must be byte-identical for
// identical inputs and flags, so keys keep insertion order (ordered_json)
// and every floating-point number is printed with printf %.6g — six
// significant digits, no locale, no shortest-repr variation.

#include <cmath>
#include <cstdio>
#include <string>

#include <nlohmann/json.hpp>

#include "skillgauge/errors.hpp"

namespace skillgauge::report {

using Json = nlohmann::ordered_json;

namespace detail {

inline std::string format_double(double v) {
  if (!std::isfinite(v))
    throw ValidationError("report: non-finite number");
  if (v == 0.0) v = 0.0;  // collapse -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline void dump(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        out += Json(it.key()).dump();
        out += ": ";
        dump(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        dump(v, out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      // integers, booleans, strings, null: nlohmann's dump is already
      // deterministic for these
      out += j.dump();
      return;
  }
}

}  // namespace detail

inline std::string canonical_dump(const Json& j) {
  std::string out;
  detail::dump(j, out, 0);
  out += "\n";
  return out;
}

// Same float policy for CSV cells.
inline std::string csv_number(double v) { return detail::format_double(v); }

}  // namespace skillgauge::report
