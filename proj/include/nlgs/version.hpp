#pragma once

namespace nlgs {

inline constexpr const char* version = "0.1.0";

}  // namespace nlgs
