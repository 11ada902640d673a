#ifndef DSA_VERSION_HPP
#define DSA_VERSION_HPP

namespace dsa {
inline constexpr const char* kVersion = "0.1.0";
}

#endif  // DSA_VERSION_HPP
