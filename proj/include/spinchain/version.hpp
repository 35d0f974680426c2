#pragma once

namespace spinchain {

inline constexpr const char* kVersion = "0.1.0";

} // namespace spinchain
