#pragma once

namespace fewcycle {

inline constexpr const char* kVersion = "1.0.0";

} // namespace fewcycle
