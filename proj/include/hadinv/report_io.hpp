#pragma once

#include <json.hpp>

#include "hadinv/solver.hpp"

namespace hadinv {

inline constexpr int kSchemaVersion = 1;

/// JSON report schemas: field names mirror the struct members (snake_case),
/// plus schema_version. Key order is alphabetical and doubles use the
/// shortest round-trip form, so identical inputs give byte-identical output.
nlohmann::json to_json(const InversionReport& report);
nlohmann::json to_json(const HadamardEstimate& estimate);
nlohmann::json to_json(const LipschitzProbeReport& report);

}  // namespace hadinv
