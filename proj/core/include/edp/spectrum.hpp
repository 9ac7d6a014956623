#pragma once

#include <string>
#include <vector>

namespace edp {

/// Energy deformation factor f(E) = (1 + lambda*E)^q.
///
/// The self-consistent levels solve E = f(E)^{1/2} * E0. Negative lambda
/// saturates the spectrum at -1/lambda; lambda = 0 recovers E0 exactly.
struct SaturationModel {
    double lambda = 0.0;  ///< saturation parameter, inverse energy units
    double q = 1.0;       ///< exponent, >= 0

    /// True when a closed-form solution is implemented (q in {0, 1, 2, 4}).
    bool has_closed_form() const {
        return q == 0.0 || q == 1.0 || q == 2.0 || q == 4.0;
    }
};

enum class SpectrumKind { harmonic_oscillator, hydrogen, quarkonia };

/// Generator of the undeformed levels E0(n).
///
///  - harmonic_oscillator: E0(n) = hbar_omega * (n + 3/2), n >= 0
///  - hydrogen:            E0(n) = -rydberg / n^2, n >= 1
///  - quarkonia:           E0(n) = -(k^2/16) [(2n+1)^2 + p^2/(2n+1)^2], n >= 0
struct BaseSpectrum {
    SpectrumKind kind = SpectrumKind::harmonic_oscillator;
    double ho_quantum = 1.0;  ///< hbar*omega (harmonic oscillator)
    double rydberg = 0.5;     ///< E_R (hydrogen)
    double k = 1.0;           ///< scale, > 0 (quarkonia)
    double p = 0.0;           ///< shape, >= 0 (quarkonia)

    static BaseSpectrum harmonic(double hbar_omega);
    static BaseSpectrum hydrogen_atom(double rydberg);
    static BaseSpectrum quarkonium(double k, double p);
};

enum class Branch { plus, minus, unique };

const char* to_string(Branch b);

/// One self-consistently solved level. Recoverable per-level failures
/// (poles, complex roots) are carried as valid = false with a reason so
/// batch runs keep going.
struct SolvedLevel {
    int n = 0;
    int l = 0;
    double base_energy = 0.0;
    double energy = 0.0;
    Branch branch = Branch::unique;
    bool valid = true;
    std::string reason;
};

/// Undeformed level E0(n) for the given spectrum. l is validated (l >= 0,
/// and l < n for hydrogen) but does not enter the energy.
/// Throws std::domain_error for hydrogen n = 0.
double base_energy(const BaseSpectrum& spec, int n, int l = 0);

/// Closed-form solution of E = (1 + lambda*E)^{q/2} * e0 for q in {0, 1, 2, 4}.
///
/// Branches are fixed to the root continuous with the lambda -> 0 limit:
/// "+" for q = 1, "-" for q = 4. A q = 2 pole (1 - lambda*e0 ~ 0) or a
/// negative q = 4 discriminant flags the level invalid instead of throwing.
SolvedLevel solve_closed(const SaturationModel& model, double e0);

/// Root of h(E) = E - (1 + lambda*E)^{q/2} * e0 on the physical branch,
/// any q >= 0. Tracks the root by homotopy continuation from lambda = 0
/// (root E = e0) in at most 64 lambda increments, re-solving each step by
/// safeguarded bisection/Newton from the previous root. The result satisfies
/// |h(E)| < 1e-12 * max(1, |E|).
///
/// Throws convergence_error when a continuation step loses the bracket
/// (root collides with the 1 + lambda*E = 0 boundary or with another root),
/// and for roots hugging that boundary so closely that the certificate is
/// out of double precision's reach (possible for q < 1 with |lambda|*e0
/// well above 1); the solver refuses rather than return an uncertified
/// value.
SolvedLevel solve_generic(const SaturationModel& model, double e0);

/// Large-n limit -1/lambda of the saturated spectrum.
/// Throws std::domain_error at lambda = 0 (unbounded spectrum) or q < 1.
double saturation_limit(const SaturationModel& model);

/// Levels n = 0..n_max (1..n_max for hydrogen), solved closed-form when
/// available, otherwise by continuation. Invalid levels are carried in the
/// rows rather than aborting the run.
///
/// For the quarkonia kind the deformation enters as f(E) = (1+lambda*E)^q
/// applied to the full level (exponent convention of that system), which is
/// equivalent to solving with exponent 2q here.
std::vector<SolvedLevel> spectrum_table(const BaseSpectrum& spec,
                                        const SaturationModel& model, int n_max);

} // namespace edp
