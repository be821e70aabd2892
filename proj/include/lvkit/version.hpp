#pragma once

namespace lvkit {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "lvkit-report/1";

} // namespace lvkit
