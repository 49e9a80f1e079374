#pragma once

namespace berezin {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace berezin
