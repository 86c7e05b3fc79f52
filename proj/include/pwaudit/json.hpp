#pragma once

#include <json.hpp>

namespace pwaudit {

// Insertion order matters for manifests: field order is preserved as read.
using Json = nlohmann::ordered_json;

} // namespace pwaudit
