#pragma once

namespace qkpz {

inline constexpr const char* kProjectName = "qkpz";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace qkpz
