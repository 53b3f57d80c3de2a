#pragma once

namespace ideabench {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ideabench
