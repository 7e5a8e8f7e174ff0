#pragma once

namespace perimax {

inline constexpr const char* kVersion = "0.1.0";

} // namespace perimax
