#pragma once

namespace skillgauge {

inline constexpr const char* kToolVersion = "0.1.0";

// Increments on any breaking change to the report layout.
inline constexpr int kReportSchemaVersion = 1;

}  // namespace skillgauge
