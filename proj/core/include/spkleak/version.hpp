#pragma once

namespace spkleak {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spkleak
