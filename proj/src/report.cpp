#include "nulltube/report.hpp"

#include <cmath>
#include <cstdio>

namespace nulltube {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void write(const nlohmann::json& j, int indent, int depth, std::string& out) {
  using value_t = nlohmann::json::value_t;
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent) * (depth + 1), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent) * depth, ' ') : "";
  switch (j.type()) {
    case value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += pad;
        out += nlohmann::json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        write(it.value(), indent, depth + 1, out);
      }
      out += close;
      out += '}';
      return;
    }
    case value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      bool scalars = true;
      for (const auto& v : j) scalars = scalars && !v.is_structured();
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += scalars ? ", " : ",";
        first = false;
        if (!scalars) out += pad;
        write(v, indent, depth + 1, out);
      }
      if (!scalars) out += close;
      out += ']';
      return;
    }
    case value_t::number_float: {
      const double x = j.get<double>();
      // JSON has no nan/inf; emit them as strings
      out += std::isfinite(x) ? format_double(x) : "\"" + format_double(x) + "\"";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& doc, int indent) {
  std::string out;
  write(doc, indent, 0, out);
  out += '\n';
  return out;
}

}  // namespace nulltube
