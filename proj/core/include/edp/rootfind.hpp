#pragma once

#include <functional>

namespace edp {

/// Safeguarded Newton iteration on a bracketed root.
///
/// Maintains the sign-change bracket [lo, hi] and falls back to bisection
/// whenever a Newton step leaves it or fails to shrink the interval. Iterates
/// until the step stalls at machine resolution, so the result is as accurate
/// as double precision allows for the supplied f.
///
/// Requires f(lo) and f(hi) to have opposite signs (zero counts as either).
/// Throws convergence_error if max_iters is exhausted.
double newton_bisect(const std::function<double(double)>& f,
                     const std::function<double(double)>& df,
                     double lo, double hi, int max_iters = 200);

} // namespace edp
