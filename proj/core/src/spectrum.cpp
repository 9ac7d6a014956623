#include "edp/spectrum.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "edp/errors.hpp"
#include "edp/rootfind.hpp"

namespace edp {

BaseSpectrum BaseSpectrum::harmonic(double hbar_omega) {
    if (!(hbar_omega > 0)) throw std::invalid_argument("BaseSpectrum: hbar_omega must be > 0");
    BaseSpectrum s;
    s.kind = SpectrumKind::harmonic_oscillator;
    s.ho_quantum = hbar_omega;
    return s;
}

BaseSpectrum BaseSpectrum::hydrogen_atom(double rydberg) {
    if (!(rydberg > 0)) throw std::invalid_argument("BaseSpectrum: rydberg must be > 0");
    BaseSpectrum s;
    s.kind = SpectrumKind::hydrogen;
    s.rydberg = rydberg;
    return s;
}

BaseSpectrum BaseSpectrum::quarkonium(double k, double p) {
    if (!(k > 0)) throw std::invalid_argument("BaseSpectrum: k must be > 0");
    if (p < 0) throw std::invalid_argument("BaseSpectrum: p must be >= 0");
    BaseSpectrum s;
    s.kind = SpectrumKind::quarkonia;
    s.k = k;
    s.p = p;
    return s;
}

const char* to_string(Branch b) {
    switch (b) {
        case Branch::plus: return "plus";
        case Branch::minus: return "minus";
        case Branch::unique: return "unique";
    }
    return "unique";
}

double base_energy(const BaseSpectrum& spec, int n, int l) {
    if (l < 0) throw std::domain_error("base_energy: l must be >= 0");
    switch (spec.kind) {
        case SpectrumKind::harmonic_oscillator:
            if (n < 0) throw std::domain_error("base_energy: n must be >= 0");
            return spec.ho_quantum * (n + 1.5);
        case SpectrumKind::hydrogen:
            if (n < 1) throw std::domain_error("base_energy: hydrogen requires n >= 1");
            if (l >= n) throw std::domain_error("base_energy: hydrogen requires l < n");
            return -spec.rydberg / (static_cast<double>(n) * n);
        case SpectrumKind::quarkonia: {
            if (n < 0) throw std::domain_error("base_energy: n must be >= 0");
            const double m2 = static_cast<double>(2 * n + 1) * (2 * n + 1);
            return -(spec.k * spec.k / 16.0) * (m2 + spec.p * spec.p / m2);
        }
    }
    throw std::logic_error("base_energy: unknown spectrum kind");
}

SolvedLevel solve_closed(const SaturationModel& model, double e0) {
    if (!model.has_closed_form()) {
        throw std::invalid_argument("solve_closed: q must be one of {0, 1, 2, 4}");
    }
    SolvedLevel level;
    level.base_energy = e0;
    const double lam = model.lambda;

    if (model.q == 0.0 || lam == 0.0) {
        level.energy = e0;
        level.branch = (model.q == 1.0) ? Branch::plus
                     : (model.q == 4.0) ? Branch::minus
                                        : Branch::unique;
        return level;
    }
    if (model.q == 1.0) {
        level.branch = Branch::plus;
        // "+" root of the quadratic, written so that neither sign of
        // lambda*e0 cancels catastrophically.
        const double s = std::sqrt(lam * lam * e0 * e0 + 4.0);
        level.energy = (lam * e0 <= 0.0) ? 2.0 * e0 / (s - lam * e0)
                                         : e0 * (lam * e0 + s) / 2.0;
        return level;
    }
    if (model.q == 2.0) {
        level.branch = Branch::unique;
        const double denom = 1.0 - lam * e0;
        if (std::abs(denom) < 1e-12) {
            level.valid = false;
            level.reason = "pole: 1 - lambda*e0 vanishes";
            return level;
        }
        level.energy = e0 / denom;
        return level;
    }
    // q = 4
    level.branch = Branch::minus;
    if (e0 == 0.0) {
        level.energy = 0.0;
        return level;
    }
    const double disc = 1.0 - 4.0 * lam * e0;
    if (disc < 0.0) {
        level.valid = false;
        level.reason = "complex roots: 1 - 4*lambda*e0 < 0";
        return level;
    }
    // "-" root rationalized: (1 - 2 lam e0 - sqrt(disc)) / (2 lam^2 e0)
    // multiplied through by its conjugate. The denominator is bounded away
    // from zero wherever disc >= 0, so the small-lambda limit stays exact.
    level.energy = 2.0 * e0 / (1.0 - 2.0 * lam * e0 + std::sqrt(disc));
    return level;
}

namespace {

// Solves h(E) = E - (1+lam*E)^{q/2} e0 = 0 near the guess, keeping the
// search inside the admissible region 1 + lam*E > 0.
double solve_step(double lam, double half_q, double e0, double guess) {
    const auto h = [&](double e) {
        return e - std::pow(1.0 + lam * e, half_q) * e0;
    };
    const auto dh = [&](double e) {
        if (half_q == 0.0) return 1.0;
        return 1.0 - half_q * lam * std::pow(1.0 + lam * e, half_q - 1.0) * e0;
    };

    // Admissible open interval for E.
    double lo_bound = -std::numeric_limits<double>::infinity();
    double hi_bound = std::numeric_limits<double>::infinity();
    if (lam > 0) lo_bound = -1.0 / lam;
    if (lam < 0) hi_bound = -1.0 / lam;
    const auto clamp = [&](double e) {
        const double margin = 1e-14;
        if (e <= lo_bound) e = lo_bound + margin * std::max(1.0, std::abs(lo_bound));
        if (e >= hi_bound) e = hi_bound - margin * std::max(1.0, std::abs(hi_bound));
        return e;
    };

    double lo = clamp(guess);
    double hi = lo;
    double flo = h(lo);
    double fhi = flo;
    if (flo == 0.0) return lo;
    double step = std::max(0.05, 0.05 * std::abs(guess));
    bool bracketed = false;
    for (int i = 0; i < 200 && !bracketed; ++i) {
        bool grew = false;
        if (double cand = clamp(lo - step); cand < lo) {
            lo = cand;
            flo = h(lo);
            grew = true;
        }
        if (double cand = clamp(hi + step); cand > hi) {
            hi = cand;
            fhi = h(hi);
            grew = true;
        }
        bracketed = std::signbit(flo) != std::signbit(fhi) || flo == 0.0 || fhi == 0.0;
        if (!grew && !bracketed) {
            throw convergence_error(
                "solve_generic: bracket lost at the 1 + lambda*E = 0 boundary");
        }
        step *= 2.0;
    }
    if (!bracketed) {
        throw convergence_error("solve_generic: no sign change found around guess");
    }
    return newton_bisect(h, dh, lo, hi);
}

} // namespace

SolvedLevel solve_generic(const SaturationModel& model, double e0) {
    if (model.q < 0) throw std::invalid_argument("solve_generic: q must be >= 0");
    SolvedLevel level;
    level.base_energy = e0;
    level.branch = Branch::unique;

    if (model.lambda == 0.0 || model.q == 0.0 || e0 == 0.0) {
        level.energy = e0;
        return level;
    }

    const double half_q = 0.5 * model.q;
    const double lam_target = model.lambda;

    // Homotopy in lambda from 0 (root E = e0), at most 64 increments.
    // A failed increment is retried at half size.
    int max_increments = 64;
    double lam = 0.0;
    double root = e0;
    double step = lam_target / 4.0;
    while (lam != lam_target) {
        if (max_increments-- <= 0) {
            throw convergence_error("solve_generic: continuation exceeded 64 increments");
        }
        double next = lam + step;
        if ((lam_target > 0 && next > lam_target) || (lam_target < 0 && next < lam_target)) {
            next = lam_target;
        }
        try {
            root = solve_step(next, half_q, e0, root);
            lam = next;
        } catch (const convergence_error&) {
            step *= 0.5;
            if (std::abs(step) < std::abs(lam_target) * 1e-3) throw;
        }
    }

    const double res = root - std::pow(1.0 + lam_target * root, half_q) * e0;
    if (std::abs(res) >= 1e-12 * std::max(1.0, std::abs(root))) {
        throw convergence_error("solve_generic: fixed-point certificate not met");
    }
    level.energy = root;
    return level;
}

double saturation_limit(const SaturationModel& model) {
    if (model.lambda == 0.0) {
        throw std::domain_error("saturation_limit: lambda = 0 has no saturation");
    }
    if (model.q < 1.0) {
        throw std::domain_error("saturation_limit: requires q >= 1");
    }
    return -1.0 / model.lambda;
}

std::vector<SolvedLevel> spectrum_table(const BaseSpectrum& spec,
                                        const SaturationModel& model, int n_max) {
    const int n_lo = (spec.kind == SpectrumKind::hydrogen) ? 1 : 0;
    if (n_max < n_lo) throw std::invalid_argument("spectrum_table: n_max too small");

    // Quarkonia levels deform with the full factor (1+lambda*E)^q rather
    // than its square root; solving with exponent 2q maps one convention
    // onto the other.
    SaturationModel effective = model;
    if (spec.kind == SpectrumKind::quarkonia) effective.q = 2.0 * model.q;

    std::vector<SolvedLevel> rows;
    rows.reserve(n_max - n_lo + 1);
    for (int n = n_lo; n <= n_max; ++n) {
        const double e0 = base_energy(spec, n);
        SolvedLevel level;
        try {
            level = effective.has_closed_form() ? solve_closed(effective, e0)
                                                : solve_generic(effective, e0);
        } catch (const std::exception& e) {
            level.base_energy = e0;
            level.valid = false;
            level.reason = e.what();
        }
        level.n = n;
        rows.push_back(std::move(level));
    }
    return rows;
}

} // namespace edp
