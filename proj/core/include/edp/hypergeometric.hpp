#pragma once

#include <functional>

namespace edp::specfun {

/// Evaluation controls for the hypergeometric series.
///
/// Denominator parameters must not be zero or a negative integer unless the
/// numerator parameters terminate the series before the pole is reached.
struct SeriesParams {
    int max_terms = 500;  ///< hard cap before a convergence_error
    double tol = 1e-15;   ///< relative term cutoff: stop once |term| < tol*|sum|
};

/// Per-term hook for tests that instrument the running accumulator.
/// Called as observer(k, term_k) for every term added to the partial sum.
using TermObserver = std::function<void(int, double)>;

/// Confluent hypergeometric series 1F1(a; c; x) = sum_k (a)_k x^k / ((c)_k k!).
///
/// When a is a non-positive integer the terminating polynomial is summed
/// exactly, independent of max_terms/tol. Pochhammer factors are carried
/// multiplicatively in the running term.
double hyp1f1(double a, double c, double x, const SeriesParams& params = {},
              const TermObserver& observer = {});

/// Gauss hypergeometric series 2F1(a, b; c; x).
///
/// Requires |x| < 1 unless a or b is a non-positive integer (terminating
/// case, any finite x). Same truncation contract as hyp1f1.
double hyp2f1(double a, double b, double c, double x, const SeriesParams& params = {},
              const TermObserver& observer = {});

} // namespace edp::specfun
