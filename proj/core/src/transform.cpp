#include "edp/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "edp/errors.hpp"
#include "edp/hypergeometric.hpp"
#include "edp/quadrature.hpp"
#include "edp/rootfind.hpp"

namespace edp::xform {

namespace {

double gp(const TransformSpec& spec, double x) {
    const double value = spec.g(x) * spec.P(x);
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw std::domain_error("transform: g*P must be positive and finite inside the domain");
    }
    return value;
}

void check_interior(const TransformSpec& spec, double x) {
    if (!(x > spec.x_min && x < spec.x_max)) {
        throw std::domain_error("transform: x outside the open domain");
    }
}

// Integral of dt / sqrt(g P) from x_ref to x under t = x_ref +/- s^2, which
// keeps integrable sqrt-type endpoint singularities at x_ref finite.
double map_integral(const TransformSpec& spec, double x) {
    const double span = x - spec.x_ref;
    if (span == 0.0) return 0.0;
    const double dir = span > 0 ? 1.0 : -1.0;
    const auto integrand = [&](double s) {
        return 2.0 * s / std::sqrt(gp(spec, spec.x_ref + dir * s * s));
    };
    return dir * integrate(integrand, 0.0, std::sqrt(std::abs(span)), 1e-10);
}

double step_size(double u) { return 1e-5 * std::max(1.0, std::abs(u)); }

// F'(u) = sqrt(g(F) P(F)) evaluated through the inverse map.
double f_prime(const TransformSpec& spec, double u) {
    return std::sqrt(gp(spec, inverse_map(spec, u)));
}

struct SolvedSelfConsistent {
    double energy;
    double f_sqrt;  // (1 + lambda*E)^{q/2}
};

SolvedSelfConsistent solve_self_consistent(const SaturationModel& model, double e0,
                                           const char* who) {
    const SolvedLevel level = model.has_closed_form() ? solve_closed(model, e0)
                                                      : solve_generic(model, e0);
    if (!level.valid) {
        throw convergence_error(std::string(who) + ": level invalid (" + level.reason + ")");
    }
    const double one_plus = 1.0 + model.lambda * level.energy;
    if (!(one_plus > 0.0)) {
        throw std::domain_error(std::string(who) + ": 1 + lambda*E must stay positive");
    }
    return {level.energy, std::pow(one_plus, model.q / 2.0)};
}

// Solves the tiny normal-equation system of the basis least squares fit.
std::vector<double> solve_normal_equations(std::vector<std::vector<double>> A,
                                           std::vector<double> rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(A[r][col]) > std::abs(A[pivot][col])) pivot = r;
        }
        if (A[pivot][col] == 0.0) {
            throw std::invalid_argument("split: degenerate potential basis");
        }
        std::swap(A[col], A[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = A[r][col] / A[col][col];
            for (std::size_t c = col; c < n; ++c) A[r][c] -= factor * A[col][c];
            rhs[r] -= factor * rhs[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double acc = rhs[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= A[i][c] * x[c];
        x[i] = acc / A[i][i];
    }
    return x;
}

} // namespace

double map_coordinate(const TransformSpec& spec, double x) {
    if (x == spec.x_ref) return 0.0;  // empty integral, boundary anchor included
    check_interior(spec, x);
    return spec.sign * map_integral(spec, x);
}

double inverse_map(const TransformSpec& spec, double u) {
    if (u == 0.0) return spec.x_ref;

    // Expand a bracket from x_ref in the direction matching u's sign.
    const double target = spec.sign * u;  // map_integral is increasing in x
    double lo = spec.x_ref;
    double hi = spec.x_ref;
    const double scale = std::max(1.0, std::abs(spec.x_ref));
    double step = 1e-3 * scale;
    const auto shifted = [&](double x) { return map_integral(spec, x) - target; };
    if (target > 0.0) {
        for (int i = 0; i < 200; ++i) {
            hi = std::min(spec.x_ref + step, spec.x_max);
            if (hi >= spec.x_max) {
                hi = std::nextafter(spec.x_max, spec.x_min);
                if (shifted(hi) < 0.0) {
                    throw std::domain_error("inverse_map: u beyond the image of the domain");
                }
                break;
            }
            if (shifted(hi) >= 0.0) break;
            step *= 4.0;
        }
    } else {
        for (int i = 0; i < 200; ++i) {
            lo = std::max(spec.x_ref - step, spec.x_min);
            if (lo <= spec.x_min) {
                lo = std::nextafter(spec.x_min, spec.x_max);
                if (shifted(lo) > 0.0) {
                    throw std::domain_error("inverse_map: u beyond the image of the domain");
                }
                break;
            }
            if (shifted(lo) <= 0.0) break;
            step *= 4.0;
        }
    }
    const auto dmap = [&](double x) { return 1.0 / std::sqrt(gp(spec, x)); };
    return newton_bisect(shifted, dmap, lo, hi);
}

double gauge_weight(const TransformSpec& spec, double u) {
    const double x = inverse_map(spec, u);
    const double fp = std::sqrt(gp(spec, x));
    if (!(std::abs(fp) > 0.0)) {
        throw std::domain_error("gauge_weight: F'(u) vanishes");
    }
    const double h = step_size(u);
    const double fpp = (f_prime(spec, u + h) - f_prime(spec, u - h)) / (2.0 * h);
    return (spec.g(x) * spec.Q(x) - fpp) / (2.0 * fp);
}

double effective_potential(const TransformSpec& spec, double u) {
    const double h = step_size(u);
    const double w = gauge_weight(spec, u);
    const double wp = (gauge_weight(spec, u + h) - gauge_weight(spec, u - h)) / (2.0 * h);
    return w * w + wp;
}

TransformResult split_potential_energy(const TransformSpec& spec,
                                       const std::vector<double>& u_grid,
                                       double mass) {
    if (u_grid.size() < 8) {
        throw std::invalid_argument("split: grid needs at least 8 points");
    }
    if (!std::is_sorted(u_grid.begin(), u_grid.end())) {
        throw std::invalid_argument("split: grid must be increasing");
    }
    if (!(mass > 0.0)) throw std::invalid_argument("split: mass must be > 0");

    TransformResult out;
    out.u_grid = u_grid;
    const std::size_t npts = u_grid.size();
    out.F.resize(npts);
    out.W.resize(npts);
    out.v.resize(npts);
    out.V.resize(npts);

    const double prefactor = 1.0 / (2.0 * mass);  // hbar = 1
    std::vector<double> s(npts);
    for (std::size_t i = 0; i < npts; ++i) {
        const double u = u_grid[i];
        const double x = inverse_map(spec, u);
        out.F[i] = x;
        out.W[i] = gauge_weight(spec, u);
        out.v[i] = effective_potential(spec, u);
        s[i] = prefactor * (out.v[i] - spec.g(x) * spec.R(x));
    }

    double energy = 0.0;
    double defect = 0.0;
    if (spec.potential_model) {
        // s - V should be the constant -E.
        double mean = 0.0;
        std::vector<double> d(npts);
        for (std::size_t i = 0; i < npts; ++i) {
            d[i] = s[i] - spec.potential_model(u_grid[i]);
            mean += d[i];
        }
        mean /= static_cast<double>(npts);
        energy = -mean;
        for (std::size_t i = 0; i < npts; ++i) {
            defect = std::max(defect, std::abs(d[i] + energy));
        }
        for (std::size_t i = 0; i < npts; ++i) out.V[i] = s[i] + energy;
    } else if (!spec.potential_basis.empty()) {
        // Least squares s ~ sum_j c_j b_j(u) - E over basis plus constant.
        const std::size_t nb = spec.potential_basis.size() + 1;
        std::vector<std::vector<double>> design(npts, std::vector<double>(nb, 1.0));
        for (std::size_t i = 0; i < npts; ++i) {
            for (std::size_t j = 0; j + 1 < nb; ++j) {
                design[i][j] = spec.potential_basis[j](u_grid[i]);
            }
        }
        std::vector<std::vector<double>> ata(nb, std::vector<double>(nb, 0.0));
        std::vector<double> atb(nb, 0.0);
        for (std::size_t i = 0; i < npts; ++i) {
            for (std::size_t r = 0; r < nb; ++r) {
                atb[r] += design[i][r] * s[i];
                for (std::size_t c = 0; c < nb; ++c) ata[r][c] += design[i][r] * design[i][c];
            }
        }
        const std::vector<double> coeff = solve_normal_equations(std::move(ata), std::move(atb));
        energy = -coeff.back();
        for (std::size_t i = 0; i < npts; ++i) {
            double fit = coeff.back();
            for (std::size_t j = 0; j + 1 < nb; ++j) {
                fit += coeff[j] * spec.potential_basis[j](u_grid[i]);
            }
            defect = std::max(defect, std::abs(s[i] - fit));
            out.V[i] = s[i] + energy;
        }
    } else {
        throw std::invalid_argument("split: declare potential_model or potential_basis");
    }

    if (defect > 1e-6 * (1.0 + std::abs(energy))) {
        throw convergence_error("split: extracted constant is not constant (defect " +
                                std::to_string(defect) + ")");
    }
    out.energy = energy;
    out.constancy_defect = defect;
    return out;
}

TransformSpec oscillator_spec(double k, double c, double a) {
    if (!(k > 0)) throw std::invalid_argument("oscillator_spec: k must be > 0");
    TransformSpec spec;
    spec.P = [](double x) { return x; };
    spec.Q = [c](double x) { return c - x; };
    spec.R = [a](double) { return -a; };
    spec.g = [k](double) { return k * k; };
    spec.x_min = 0.0;
    spec.x_max = std::numeric_limits<double>::infinity();
    spec.x_ref = 0.0;
    spec.params = {{"k", k}, {"c", c}, {"a", a}};
    spec.potential_basis = {[](double u) { return u * u; },
                            [](double u) { return 1.0 / (u * u); }};
    return spec;
}

TransformSpec coulomb_spec(double k, double c, double a) {
    if (!(k > 0)) throw std::invalid_argument("coulomb_spec: k must be > 0");
    TransformSpec spec;
    spec.P = [](double x) { return x; };
    spec.Q = [c](double x) { return c - x; };
    spec.R = [a](double) { return -a; };
    spec.g = [k](double x) { return k * k / x; };
    spec.x_min = 0.0;
    spec.x_max = std::numeric_limits<double>::infinity();
    spec.x_ref = 0.0;
    spec.params = {{"k", k}, {"c", c}, {"a", a}};
    spec.potential_basis = {[](double u) { return 1.0 / (u * u); },
                            [](double u) { return 1.0 / u; }};
    return spec;
}

double oscillator_gauge_weight(double u, double c, double k) {
    return (2.0 * c - 1.0) / (2.0 * u) - u * k * k / 4.0;
}

double oscillator_effective_potential(double u, double c, double k) {
    const double k2 = k * k;
    return (4.0 * c * c + 3.0 - 8.0 * c) / (4.0 * u * u) + u * u * k2 * k2 / 16.0 -
           c * k2 / 2.0;
}

double oscillator_split_energy(double c, double a, double k, double mass) {
    return k * k / (4.0 * mass) * (c - 2.0 * a);
}

double coulomb_gauge_weight(double u, double c, double k) {
    return c / (2.0 * u) - k / 2.0;
}

double coulomb_effective_potential(double u, double c, double k) {
    return c * c / (4.0 * u * u) + k * k / 4.0 - c * k / (2.0 * u) - c / (2.0 * u * u);
}

double coulomb_split_energy(double k, double mass) {
    return -k * k / (8.0 * mass);
}

double oscillator_eigenfunction(int n, int l, const SaturationModel& model,
                                double omega, double r) {
    if (n < 0 || l < 0 || l > n) {
        throw std::domain_error("oscillator_eigenfunction: need 0 <= l <= n");
    }
    if ((n - l) % 2 != 0) {
        throw std::domain_error(
            "oscillator_eigenfunction: n - l must be even (series must terminate)");
    }
    if (!(r > 0.0)) throw std::domain_error("oscillator_eigenfunction: r must be > 0");
    if (!(omega > 0.0)) throw std::invalid_argument("oscillator_eigenfunction: omega must be > 0");

    const double e0 = omega * (n + 1.5);
    const auto sc = solve_self_consistent(model, e0, "oscillator_eigenfunction");
    const double k_sq = 4.0 * omega * sc.f_sqrt;  // hbar = m = 1
    const double series = specfun::hyp1f1(0.5 * (l - n), l + 1.5, r * r * k_sq / 4.0);
    return std::pow(r, l + 1) * std::exp(-r * r * omega * sc.f_sqrt / 2.0) * series;
}

double coulomb_eigenfunction(int n, int l, const SaturationModel& model,
                             double a0, double u, CoulombPrefactor prefactor) {
    if (n < 1) throw std::domain_error("coulomb_eigenfunction: n must be >= 1");
    if (l < 0 || l >= n) throw std::domain_error("coulomb_eigenfunction: need 0 <= l < n");
    if (!(u > 0.0)) throw std::domain_error("coulomb_eigenfunction: u must be > 0");
    if (!(a0 > 0.0)) throw std::invalid_argument("coulomb_eigenfunction: a0 must be > 0");

    const double e0 = -1.0 / (2.0 * a0 * a0 * n * n);
    const auto sc = solve_self_consistent(model, e0, "coulomb_eigenfunction");
    const double scaled = sc.f_sqrt * u / (n * a0);
    const int exponent = (prefactor == CoulombPrefactor::ell_minus_one) ? l - 1 : l + 1;
    const double series =
        specfun::hyp1f1(l + 1.0 - n, 2.0 * (l + 1.0), 2.0 * scaled);
    return std::pow(u, exponent) * std::exp(-scaled) * series;
}

} // namespace edp::xform
