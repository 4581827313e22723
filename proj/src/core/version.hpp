#pragma once

namespace imsprep {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace imsprep
