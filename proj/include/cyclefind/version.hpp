#pragma once

namespace cyclefind {

inline constexpr const char* version = "1.0.0";

/// Version of the serialized report layout, embedded in every JSON report.
inline constexpr int report_schema_version = 1;

}  // namespace cyclefind
