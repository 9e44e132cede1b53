#pragma once

namespace gpsel {

inline constexpr const char* kToolName = "gpsel";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace gpsel
