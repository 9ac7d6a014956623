#pragma once

#include <functional>

namespace edp {

/// Adaptive Gauss-Kronrod integral of f over [a, b] (a <= b or a > b, signed).
/// Throws quadrature_error when the error estimate exceeds abs_tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10);

} // namespace edp
