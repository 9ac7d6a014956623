#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace edp::quarkonia {

enum class System { ccbar, bbbar };

std::string to_string(System system);
std::optional<System> system_from_string(std::string_view name);

/// Quark masses adopted for the reference tables (GeV).
inline constexpr double kDefaultCharmMass = 1.697;
inline constexpr double kDefaultBottomMass = 4.568;
/// Alternative constituent masses quoted alongside the adopted pair.
inline constexpr double kAltCharmMass = 1.209;
inline constexpr double kAltBottomMass = 4.350;

double default_quark_mass(System system);

/// Model parameters for the linearly energy-dependent (q = 1) spectrum
/// E_n = beta / (16 - lambda*beta).
struct Params {
    double k = 1.0;            ///< GeV, > 0
    double p = 0.0;            ///< dimensionless, >= 0
    double lambda = 0.0;       ///< GeV^-1
    double quark_mass = 0.0;   ///< GeV, > 0
    double antiquark_mass = 0.0;
};

/// beta(n) = -k^2 [(2n+1)^2 + p^2/(2n+1)^2]; always negative for real k, p.
double beta(int n, double k, double p);

/// beta(n) = -(k_sq (2n+1)^2 + k_sq_p_sq/(2n+1)^2) in terms of the signed
/// coefficient pair (k^2, k^2 p^2) the splitting fit solves for. Fits of the
/// experimental splittings land on negative k^2; the spectrum stays real.
double beta_coefficients(int n, double k_sq, double k_sq_p_sq);

/// Self-consistent level E_n = beta/(16 - lambda*beta); equals beta/16 at
/// lambda = 0. Throws pole_error when |16 - lambda*beta| < 1e-10.
double energy(int n, const Params& params);
double energy_coefficients(int n, double k_sq, double k_sq_p_sq, double lambda);

/// Spin-averaged mass M = m_q + m_qbar + E_n.
double mass(int n, const Params& params);

/// "1S", "2S", ... for n = 0, 1, ...
std::string state_name(int n);

struct ExperimentalRow {
    std::string state;
    double mass_gev = 0.0;
    bool present = false;
};

/// Experimental spin-averaged masses of one system; states missing from the
/// data file are absent rows.
struct ExperimentalTable {
    System system = System::ccbar;
    std::vector<ExperimentalRow> rows;

    std::optional<double> mass_of(std::string_view state) const;
};

/// Loads the comma-separated data file (system,state,mass_GeV,source).
/// Throws std::runtime_error on unreadable or malformed input.
std::map<System, ExperimentalTable> load_experimental(const std::string& csv_path);

/// The two mass splittings fitted per system, as (upper, lower) level
/// indices: ccbar fits 2S-1S and 4S-3S, bbbar fits 3S-1S and 4S-2S.
using SplittingScheme = std::array<std::pair<int, int>, 2>;
SplittingScheme splitting_scheme(System system);

struct FitResult {
    System system = System::ccbar;
    double lambda = 0.0;
    double k_sq = 0.0;      ///< fitted k^2 (signed)
    double k_sq_p_sq = 0.0; ///< fitted k^2 p^2 (signed)
    std::array<double, 2> residuals{0.0, 0.0};
    bool converged = false;
    int roots_found = 0;    ///< distinct splitting-system roots examined

    double p_sq() const { return k_sq_p_sq / k_sq; }
    bool real_parameters() const { return k_sq > 0.0 && p_sq() >= 0.0; }
    std::optional<double> fitted_k() const;
    std::optional<double> fitted_p() const;
};

/// Solves the 2x2 system matching the model splittings to the experimental
/// ones at the given lambda. Damped Newton with a central-difference
/// Jacobian runs from the lambda = 0 closed-form guess (linear in k^2 and
/// k^2 p^2) plus a fixed multistart grid; among the distinct pole-free roots
/// the fit keeps the one with a monotone low-lying spectrum closest to the
/// experimental masses. Converged means max |residual| < 1e-8 GeV.
///
/// Throws std::invalid_argument when required experimental states are
/// missing and convergence_error when no start converges.
FitResult fit(System system, double lambda, const ExperimentalTable& exp,
              double quark_mass);

struct MassRow {
    std::string state;
    double lambda = 0.0;
    double mass_gev = 0.0;
    std::optional<double> experimental;
    std::optional<double> deviation;
    bool saturation_bound = false;
};

struct MassReport {
    std::vector<MassRow> rows;
    std::vector<double> failed_lambdas;  ///< lambdas whose fit failed (skipped)
};

/// For each lambda: fit, then emit M(nS) for n = 0..n_max alongside the
/// experimental masses and deviations, plus the saturation bound
/// m_q + m_qbar - 1/lambda as a footer row for lambda < 0.
MassReport mass_table(System system, const std::vector<double>& lambdas,
                      const ExperimentalTable& exp, double quark_mass, int n_max);

} // namespace edp::quarkonia
