#pragma once

namespace cmfs {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cmfs
