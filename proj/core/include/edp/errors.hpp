#pragma once

#include <stdexcept>

namespace edp {

/// An iteration (series, root search, continuation) exhausted its budget.
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A parameter pole was hit before the expression could be evaluated.
struct pole_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature could not certify the requested tolerance.
struct quadrature_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace edp
