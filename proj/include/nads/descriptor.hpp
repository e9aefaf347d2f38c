#pragma once

// JSON system descriptors:
//   {"rule": {"kind": ..., params}, "limit": PLMap | null, "space": "interval" | "cantor",
//    "surjectivity": "require" | "warn"}
// A missing or null limit selects the rule's natural limit.

#include <string>
#include <variant>

#include <json.hpp>

#include "nads/constructions.hpp"
#include "nads/systems.hpp"

namespace nads {

using AnySystem = std::variant<System, OdometerSystem>;

AnySystem system_from_json(const nlohmann::json& j);
// As above, rejecting code-space descriptors.
System interval_system_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AnySystem& s);

AnySystem load_descriptor(const std::string& path);

}  // namespace nads
