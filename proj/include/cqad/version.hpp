#pragma once

namespace cqad {

inline constexpr const char* version = "0.1.0";

}  // namespace cqad
