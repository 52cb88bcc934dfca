#pragma once

namespace otoc {

inline constexpr const char* version = "0.1.0";

} // namespace otoc
