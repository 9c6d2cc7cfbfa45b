#pragma once

namespace subriem {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace subriem
