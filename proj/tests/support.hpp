#pragma once

#include <ostream>

#include "testing.hpp"
#include "random_pairs.hpp"

namespace rvs {
inline std::ostream& operator<<(std::ostream& os, PairType v) { return os << toString(v); }
inline std::ostream& operator<<(std::ostream& os, VerdictKind v) { return os << toString(v); }
inline std::ostream& operator<<(std::ostream& os, PointVerdict v) { return os << toString(v); }
inline std::ostream& operator<<(std::ostream& os, Winner v) { return os << toString(v); }
}  // namespace rvs
