#include "edp/quarkonia.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "edp/errors.hpp"

namespace edp::quarkonia {

namespace {

constexpr double kPoleGuard = 1e-10;
constexpr double kFitTol = 1e-8;
constexpr int kFitMaxIters = 200;
constexpr int kMonotoneRange = 9;  // pole guard / monotonicity window 1S..10S

double odd_sq(int n) {
    const double m = 2.0 * n + 1.0;
    return m * m;
}

} // namespace

std::string to_string(System system) {
    return system == System::ccbar ? "ccbar" : "bbbar";
}

std::optional<System> system_from_string(std::string_view name) {
    if (name == "ccbar") return System::ccbar;
    if (name == "bbbar") return System::bbbar;
    return std::nullopt;
}

double default_quark_mass(System system) {
    return system == System::ccbar ? kDefaultCharmMass : kDefaultBottomMass;
}

double beta(int n, double k, double p) {
    if (n < 0) throw std::domain_error("beta: n must be >= 0");
    if (!(k > 0)) throw std::domain_error("beta: k must be > 0");
    if (p < 0) throw std::domain_error("beta: p must be >= 0");
    return beta_coefficients(n, k * k, k * k * p * p);
}

double beta_coefficients(int n, double k_sq, double k_sq_p_sq) {
    if (n < 0) throw std::domain_error("beta: n must be >= 0");
    const double m2 = odd_sq(n);
    return -(k_sq * m2 + k_sq_p_sq / m2);
}

double energy_coefficients(int n, double k_sq, double k_sq_p_sq, double lambda) {
    const double b = beta_coefficients(n, k_sq, k_sq_p_sq);
    const double denom = 16.0 - lambda * b;
    if (std::abs(denom) < kPoleGuard) {
        throw pole_error("energy: 16 - lambda*beta vanishes at n = " + std::to_string(n));
    }
    return b / denom;
}

double energy(int n, const Params& params) {
    if (!(params.k > 0)) throw std::domain_error("energy: k must be > 0");
    if (params.p < 0) throw std::domain_error("energy: p must be >= 0");
    return energy_coefficients(n, params.k * params.k,
                               params.k * params.k * params.p * params.p,
                               params.lambda);
}

double mass(int n, const Params& params) {
    if (!(params.quark_mass > 0) || !(params.antiquark_mass > 0)) {
        throw std::domain_error("mass: quark masses must be > 0");
    }
    return params.quark_mass + params.antiquark_mass + energy(n, params);
}

std::string state_name(int n) { return std::to_string(n + 1) + "S"; }

std::optional<double> ExperimentalTable::mass_of(std::string_view state) const {
    for (const auto& row : rows) {
        if (row.state == state && row.present) return row.mass_gev;
    }
    return std::nullopt;
}

std::map<System, ExperimentalTable> load_experimental(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("load_experimental: cannot open " + csv_path);

    std::map<System, ExperimentalTable> tables;
    tables[System::ccbar].system = System::ccbar;
    tables[System::bbbar].system = System::bbbar;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string system_name, state, mass_str, source;
        if (!std::getline(fields, system_name, ',') || !std::getline(fields, state, ',') ||
            !std::getline(fields, mass_str, ',')) {
            throw std::runtime_error("load_experimental: malformed line " +
                                     std::to_string(line_no) + " in " + csv_path);
        }
        std::getline(fields, source, ',');
        const auto system = system_from_string(system_name);
        if (!system) {
            throw std::runtime_error("load_experimental: unknown system '" + system_name +
                                     "' on line " + std::to_string(line_no));
        }
        ExperimentalRow row;
        row.state = state;
        try {
            row.mass_gev = std::stod(mass_str);
        } catch (const std::exception&) {
            throw std::runtime_error("load_experimental: bad mass on line " +
                                     std::to_string(line_no));
        }
        if (!(row.mass_gev > 0)) {
            throw std::runtime_error("load_experimental: non-positive mass on line " +
                                     std::to_string(line_no));
        }
        row.present = true;
        auto& table = tables[*system];
        for (const auto& existing : table.rows) {
            if (existing.state == row.state) {
                throw std::runtime_error("load_experimental: duplicate state " + row.state);
            }
        }
        table.rows.push_back(std::move(row));
    }
    return tables;
}

SplittingScheme splitting_scheme(System system) {
    if (system == System::ccbar) return {{{1, 0}, {3, 2}}};
    return {{{2, 0}, {3, 1}}};
}

std::optional<double> FitResult::fitted_k() const {
    if (k_sq > 0) return std::sqrt(k_sq);
    return std::nullopt;
}

std::optional<double> FitResult::fitted_p() const {
    if (k_sq != 0.0 && p_sq() >= 0) return std::sqrt(p_sq());
    return std::nullopt;
}

namespace {

using Coeffs = std::array<double, 2>;  // (k_sq, k_sq_p_sq)

struct FitProblem {
    double lambda;
    SplittingScheme scheme;
    std::array<double, 2> targets;

    std::array<double, 2> residuals(const Coeffs& x) const {
        std::array<double, 2> r{};
        for (int i = 0; i < 2; ++i) {
            const auto [hi, lo] = scheme[i];
            r[i] = energy_coefficients(hi, x[0], x[1], lambda) -
                   energy_coefficients(lo, x[0], x[1], lambda) - targets[i];
        }
        return r;
    }
};

double max_abs(const std::array<double, 2>& r) {
    return std::max(std::abs(r[0]), std::abs(r[1]));
}

// Exact solution at lambda = 0, where the splittings are linear in the
// coefficient pair.
Coeffs linear_guess(const FitProblem& problem) {
    double A[2][2];
    for (int i = 0; i < 2; ++i) {
        const auto [hi, lo] = problem.scheme[i];
        A[i][0] = -(odd_sq(hi) - odd_sq(lo)) / 16.0;
        A[i][1] = -(1.0 / odd_sq(hi) - 1.0 / odd_sq(lo)) / 16.0;
    }
    const double det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
    if (std::abs(det) < 1e-14) {
        throw convergence_error("fit: degenerate splitting system");
    }
    const double s0 = problem.targets[0];
    const double s1 = problem.targets[1];
    return {(s0 * A[1][1] - s1 * A[0][1]) / det, (A[0][0] * s1 - A[1][0] * s0) / det};
}

// Damped Newton with a central-difference Jacobian (relative step 1e-6).
std::optional<Coeffs> newton_solve(const FitProblem& problem, Coeffs x) {
    auto safe_residuals = [&](const Coeffs& c) -> std::optional<std::array<double, 2>> {
        try {
            return problem.residuals(c);
        } catch (const pole_error&) {
            return std::nullopt;
        }
    };
    auto r = safe_residuals(x);
    if (!r) return std::nullopt;
    for (int it = 0; it < kFitMaxIters; ++it) {
        if (max_abs(*r) < 1e-12) return x;
        double J[2][2];
        for (int col = 0; col < 2; ++col) {
            const double h = 1e-6 * std::max(1.0, std::abs(x[col]));
            Coeffs xp = x, xm = x;
            xp[col] += h;
            xm[col] -= h;
            const auto rp = safe_residuals(xp);
            const auto rm = safe_residuals(xm);
            if (!rp || !rm) return std::nullopt;
            for (int row = 0; row < 2; ++row) J[row][col] = ((*rp)[row] - (*rm)[row]) / (2 * h);
        }
        const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        if (!std::isfinite(det) || std::abs(det) < 1e-300) return std::nullopt;
        const Coeffs step = {-( (*r)[0] * J[1][1] - (*r)[1] * J[0][1]) / det,
                             -(J[0][0] * (*r)[1] - J[1][0] * (*r)[0]) / det};
        double damp = 1.0;
        bool advanced = false;
        while (damp > 1e-12) {
            const Coeffs trial = {x[0] + damp * step[0], x[1] + damp * step[1]};
            const auto rt = safe_residuals(trial);
            if (rt && max_abs(*rt) < max_abs(*r)) {
                x = trial;
                r = rt;
                advanced = true;
                break;
            }
            damp *= 0.5;
        }
        if (!advanced) return std::nullopt;
    }
    return (max_abs(*r) < kFitTol) ? std::optional<Coeffs>(x) : std::nullopt;
}

bool pole_free(const Coeffs& x, double lambda) {
    for (int n = 0; n <= kMonotoneRange; ++n) {
        const double denom = 16.0 - lambda * beta_coefficients(n, x[0], x[1]);
        if (std::abs(denom) < 1e-6) return false;
    }
    return true;
}

bool monotone_levels(const Coeffs& x, double lambda) {
    double prev = energy_coefficients(0, x[0], x[1], lambda);
    for (int n = 1; n <= kMonotoneRange; ++n) {
        const double cur = energy_coefficients(n, x[0], x[1], lambda);
        if (!(cur > prev)) return false;
        prev = cur;
    }
    return true;
}

} // namespace

FitResult fit(System system, double lambda, const ExperimentalTable& exp,
              double quark_mass) {
    if (!(quark_mass > 0)) throw std::invalid_argument("fit: quark_mass must be > 0");

    FitProblem problem;
    problem.lambda = lambda;
    problem.scheme = splitting_scheme(system);
    std::array<double, 4> exp_masses{};
    for (int n = 0; n < 4; ++n) {
        const auto m = exp.mass_of(state_name(n));
        if (!m) {
            throw std::invalid_argument("fit: experimental mass for " + state_name(n) +
                                        " missing");
        }
        exp_masses[n] = *m;
    }
    for (int i = 0; i < 2; ++i) {
        const auto [hi, lo] = problem.scheme[i];
        problem.targets[i] = exp_masses[hi] - exp_masses[lo];
    }

    // Start set: the lambda = 0 closed form plus a fixed sign/magnitude grid.
    // The splitting system can have several roots away from lambda = 0.
    std::vector<Coeffs> starts;
    starts.push_back(linear_guess(problem));
    for (const double sa : {1.0, -1.0}) {
        for (const double ma : {0.05, 0.2, 0.8, 3.2, 12.8}) {
            for (const double sb : {1.0, -1.0}) {
                for (const double mb : {0.25, 1.0, 4.0, 16.0, 64.0}) {
                    starts.push_back({sa * ma, sb * mb});
                }
            }
        }
    }

    std::vector<Coeffs> roots;
    for (const auto& start : starts) {
        const auto root = newton_solve(problem, start);
        if (!root) continue;
        if (!pole_free(*root, lambda)) continue;
        const bool duplicate = std::any_of(roots.begin(), roots.end(), [&](const Coeffs& r) {
            return std::abs(r[0] - (*root)[0]) <= 1e-5 * std::max(1.0, std::abs(r[0])) &&
                   std::abs(r[1] - (*root)[1]) <= 1e-5 * std::max(1.0, std::abs(r[1]));
        });
        if (!duplicate) roots.push_back(*root);
    }
    if (roots.empty()) {
        throw convergence_error("fit: no splitting-system root found for lambda = " +
                                std::to_string(lambda));
    }

    // Keep the root whose low-lying spectrum is physical (monotone) and
    // closest to the experimental masses of the fitted states.
    const double pair_mass = 2.0 * quark_mass;
    auto exp_deviation = [&](const Coeffs& x) {
        double dev = 0.0;
        for (int n = 0; n < 4; ++n) {
            dev = std::max(dev, std::abs(pair_mass + energy_coefficients(n, x[0], x[1], lambda) -
                                         exp_masses[n]));
        }
        return dev;
    };
    std::sort(roots.begin(), roots.end(), [&](const Coeffs& a, const Coeffs& b) {
        const bool ma = monotone_levels(a, lambda);
        const bool mb = monotone_levels(b, lambda);
        if (ma != mb) return ma;
        const double da = exp_deviation(a);
        const double db = exp_deviation(b);
        if (da != db) return da < db;
        return std::abs(a[0]) < std::abs(b[0]);
    });

    FitResult out;
    out.system = system;
    out.lambda = lambda;
    out.k_sq = roots.front()[0];
    out.k_sq_p_sq = roots.front()[1];
    out.residuals = problem.residuals(roots.front());
    out.converged = max_abs(out.residuals) < kFitTol;
    out.roots_found = static_cast<int>(roots.size());
    return out;
}

MassReport mass_table(System system, const std::vector<double>& lambdas,
                      const ExperimentalTable& exp, double quark_mass, int n_max) {
    if (n_max < 0) throw std::invalid_argument("mass_table: n_max must be >= 0");
    MassReport report;
    for (const double lambda : lambdas) {
        FitResult f;
        try {
            f = fit(system, lambda, exp, quark_mass);
        } catch (const std::exception&) {
            report.failed_lambdas.push_back(lambda);
            continue;
        }
        if (!f.converged) {
            report.failed_lambdas.push_back(lambda);
            continue;
        }
        for (int n = 0; n <= n_max; ++n) {
            MassRow row;
            row.state = state_name(n);
            row.lambda = lambda;
            try {
                row.mass_gev = 2.0 * quark_mass +
                               energy_coefficients(n, f.k_sq, f.k_sq_p_sq, lambda);
            } catch (const pole_error&) {
                continue;  // skip the level sitting on a pole
            }
            row.experimental = exp.mass_of(row.state);
            if (row.experimental) row.deviation = row.mass_gev - *row.experimental;
            report.rows.push_back(std::move(row));
        }
        if (lambda < 0) {
            MassRow bound;
            bound.state = "saturation";
            bound.lambda = lambda;
            bound.mass_gev = 2.0 * quark_mass - 1.0 / lambda;
            bound.saturation_bound = true;
            report.rows.push_back(std::move(bound));
        }
    }
    return report;
}

} // namespace edp::quarkonia
