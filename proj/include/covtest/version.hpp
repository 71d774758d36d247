#pragma once

namespace covtest {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace covtest
