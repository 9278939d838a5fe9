#pragma once

namespace blowlab {

inline constexpr const char* kCodeName = "blowlab";
inline constexpr const char* kCodeVersion = "0.1.0";

} // namespace blowlab
