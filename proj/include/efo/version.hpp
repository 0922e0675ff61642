#pragma once

namespace efo {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace efo
