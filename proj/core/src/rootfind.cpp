#include "edp/rootfind.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "edp/errors.hpp"

namespace edp {

double newton_bisect(const std::function<double(double)>& f,
                     const std::function<double(double)>& df,
                     double lo, double hi, int max_iters) {
    if (lo > hi) std::swap(lo, hi);
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::signbit(flo) == std::signbit(fhi)) {
        throw std::invalid_argument("newton_bisect: no sign change over bracket");
    }

    constexpr double eps = std::numeric_limits<double>::epsilon();
    double x = 0.5 * (lo + hi);
    double fx = f(x);
    for (int it = 0; it < max_iters; ++it) {
        if (fx == 0.0) return x;
        if (std::signbit(fx) == std::signbit(flo)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }

        double next;
        const double d = df(x);
        if (d != 0.0 && std::isfinite(d)) {
            next = x - fx / d;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        } else {
            next = 0.5 * (lo + hi);
        }

        const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
        if (std::abs(next - x) <= 4.0 * eps * scale || hi - lo <= 4.0 * eps * scale) {
            return x;
        }
        x = next;
        fx = f(x);
    }
    throw convergence_error("newton_bisect: iteration budget exhausted");
}

} // namespace edp
