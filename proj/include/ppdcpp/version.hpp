#pragma once

namespace ppdcpp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ppdcpp
