#pragma once

namespace coopsim {
inline constexpr const char* kEngineName = "coopsim";
inline constexpr const char* kEngineVersion = "0.1.0";
}  // namespace coopsim
