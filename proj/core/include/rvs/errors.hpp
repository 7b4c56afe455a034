#pragma once

#include <stdexcept>
#include <string>

namespace rvs {

struct FiniteOrderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ChartBoundaryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoTransitionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyIntervalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BisectionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegeneratePairError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rvs
