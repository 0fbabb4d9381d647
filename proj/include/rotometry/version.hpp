#ifndef ROTOMETRY_VERSION_HPP
#define ROTOMETRY_VERSION_HPP

namespace rotometry {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rotometry

#endif  // ROTOMETRY_VERSION_HPP
