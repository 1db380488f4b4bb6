#pragma once

namespace pshoot {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pshoot
