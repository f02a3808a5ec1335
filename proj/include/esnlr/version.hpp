#pragma once

namespace esnlr {

inline constexpr const char* kLibraryVersion = "0.1.0";

}  // namespace esnlr
