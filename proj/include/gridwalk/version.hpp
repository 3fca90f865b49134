#pragma once

namespace gridwalk {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kBuildIdent = "gridwalk 0.1.0";

}  // namespace gridwalk
