#pragma once

namespace xlra {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace xlra
