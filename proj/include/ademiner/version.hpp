#pragma once

namespace ade {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace ade
