#pragma once

#include <string_view>

namespace tickbound {

inline constexpr std::string_view kEngineVersion = "1.0.0";
inline constexpr std::string_view kReportSchema = "tickbound.report/1";
inline constexpr std::string_view kGenSpecSchema = "tickbound.genspec/1";
inline constexpr std::string_view kCompositeSchema = "tickbound.composite/1";

}  // namespace tickbound
