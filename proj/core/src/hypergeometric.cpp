#include "edp/hypergeometric.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "edp/errors.hpp"

namespace edp::specfun {

namespace {

bool is_nonpositive_integer(double v) {
    return v <= 0.0 && v == std::floor(v) && std::isfinite(v);
}

void validate(const SeriesParams& params) {
    if (params.max_terms < 1) throw std::invalid_argument("SeriesParams: max_terms must be >= 1");
    if (!(params.tol > 0.0)) throw std::invalid_argument("SeriesParams: tol must be > 0");
}

// Sums 1 + sum_{k>=1} prod_{j<k} ratio(j) where ratio(k) = term_{k+1}/term_k.
// numerator_zero(k) reports exact termination; denominator_zero(k) a pole.
template <typename Ratio, typename NumZero, typename DenZero>
double sum_series(const SeriesParams& params, bool terminating,
                  const Ratio& ratio, const NumZero& numerator_zero,
                  const DenZero& denominator_zero, const TermObserver& observer,
                  const char* name) {
    double term = 1.0;
    double sum = 1.0;
    if (observer) observer(0, term);
    for (int k = 0; k < params.max_terms; ++k) {
        if (numerator_zero(k)) return sum;  // terminated exactly, no truncation
        if (denominator_zero(k)) {
            throw pole_error(std::string(name) +
                             ": denominator parameter pole at term " + std::to_string(k + 1));
        }
        term *= ratio(k);
        sum += term;
        if (observer) observer(k + 1, term);
        if (!terminating && std::abs(term) < params.tol * std::abs(sum)) return sum;
    }
    if (terminating) {
        throw convergence_error(std::string(name) +
                                ": terminating series longer than max_terms");
    }
    throw convergence_error(std::string(name) + ": series did not converge in " +
                            std::to_string(params.max_terms) + " terms");
}

} // namespace

double hyp1f1(double a, double c, double x, const SeriesParams& params,
              const TermObserver& observer) {
    validate(params);
    const bool terminating = is_nonpositive_integer(a);
    return sum_series(
        params, terminating,
        [&](int k) { return (a + k) * x / ((c + k) * (k + 1)); },
        [&](int k) { return a + k == 0.0; },
        [&](int k) { return c + k == 0.0; },
        observer, "hyp1f1");
}

double hyp2f1(double a, double b, double c, double x, const SeriesParams& params,
              const TermObserver& observer) {
    validate(params);
    const bool terminating = is_nonpositive_integer(a) || is_nonpositive_integer(b);
    if (!terminating && std::abs(x) >= 1.0) {
        throw std::domain_error("hyp2f1: |x| >= 1 with non-terminating series");
    }
    return sum_series(
        params, terminating,
        [&](int k) { return (a + k) * (b + k) * x / ((c + k) * (k + 1)); },
        [&](int k) { return a + k == 0.0 || b + k == 0.0; },
        [&](int k) { return c + k == 0.0; },
        observer, "hyp2f1");
}

} // namespace edp::specfun
