#pragma once

#include <string>

#include "json.hpp"

namespace nulltube {

constexpr int report_schema = 1;

/// Serialises with every floating-point number printed as %.17g, objects in
/// key order, so identical inputs give byte-identical text.
std::string dump_json(const nlohmann::json& doc, int indent = 2);

/// %.17g, with non-finite values spelled nan / inf / -inf.
std::string format_double(double x);

}  // namespace nulltube
