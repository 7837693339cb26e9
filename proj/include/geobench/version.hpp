#pragma once

namespace geobench {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace geobench
