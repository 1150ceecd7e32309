#ifndef RISKBENCH_VERSION_HPP
#define RISKBENCH_VERSION_HPP

namespace riskbench {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace riskbench

#endif  // RISKBENCH_VERSION_HPP
