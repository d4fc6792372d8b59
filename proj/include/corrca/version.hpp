#pragma once

namespace corrca {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace corrca
