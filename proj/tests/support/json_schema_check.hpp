#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace fairaudit::testing {

/// Minimal JSON-Schema checker covering the subset the report schema uses:
/// type (string or array of strings), properties, required,
/// additionalProperties (boolean), items, enum, minimum. Returns a list of
/// human-readable violations (empty = valid).
std::vector<std::string> schema_violations(const nlohmann::json& schema,
                                           const nlohmann::json& instance);

}  // namespace fairaudit::testing
