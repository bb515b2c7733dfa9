#pragma once

namespace cstar {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cstar
