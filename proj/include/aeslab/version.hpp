#pragma once

namespace aeslab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace aeslab
