#ifndef QRES_VERSION_HPP
#define QRES_VERSION_HPP

namespace qres {
inline constexpr const char* kVersion = "0.1.0";
}

#endif  // QRES_VERSION_HPP
