#pragma once

namespace cymono {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cymono
