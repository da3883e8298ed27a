#pragma once

namespace selinf {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace selinf
