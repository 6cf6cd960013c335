#ifndef GAPMODE_VERSION_HPP
#define GAPMODE_VERSION_HPP

namespace gapmode {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
