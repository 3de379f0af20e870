#pragma once

namespace psk {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace psk
