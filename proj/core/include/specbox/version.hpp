#pragma once

namespace specbox {

inline constexpr const char* kVersion = "0.1.0";

}
