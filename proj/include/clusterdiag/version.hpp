#pragma once

namespace clusterdiag {
inline constexpr const char* kVersion = "0.1.0";
}
