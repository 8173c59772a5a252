#pragma once

#include <cstdio>
#include <string>

#include "json.hpp"

namespace hardylab {

// nlohmann prints the shortest round-trip form; outputs here want %.17g.
inline void dump_json_to(const nlohmann::ordered_json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case nlohmann::ordered_json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + nlohmann::ordered_json(it.key()).dump() + ": ";
        dump_json_to(it.value(), out, indent, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case nlohmann::ordered_json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump_json_to(j[i], out, indent, depth + 1);
      }
      out += "\n" + close + "]";
      return;
    }
    case nlohmann::ordered_json::value_t::number_float: {
      const double v = j.get<double>();
      if (v != v || v == 1.0 / 0.0 || v == -1.0 / 0.0) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

inline std::string dump_json(const nlohmann::ordered_json& j) {
  std::string out;
  dump_json_to(j, out, 2, 0);
  out += "\n";
  return out;
}

}  // namespace hardylab
