#pragma once

namespace affectfuse {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace affectfuse
