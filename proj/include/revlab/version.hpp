#pragma once

namespace revlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace revlab
