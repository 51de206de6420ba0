#ifndef EGGSYNTH_VERSION_HPP
#define EGGSYNTH_VERSION_HPP

namespace eggsynth {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace eggsynth

#endif
