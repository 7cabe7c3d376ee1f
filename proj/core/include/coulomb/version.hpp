#pragma once

namespace coulomb {

inline constexpr const char* kVersion = "0.3.0";

}  // namespace coulomb
