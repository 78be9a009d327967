#pragma once

#include <string>
#include <utility>
#include <vector>

#include "eitcool/atom_model.hpp"

// Master-equation machinery: dvec(rho)/dt = L vec(rho) with vec() the
// column-stacking map (Eigen's native column-major layout, so
// vec-index = row + 4*col). The dissipator is the trace-preserving Lindblad
// form sum_j [ b_j rho b_j^+ - (b_j^+ b_j rho + rho b_j^+ b_j)/2 ].

namespace eitcool {

using Matrix16cd = Eigen::Matrix<complexd, 16, 16>;
using Vector16cd = Eigen::Matrix<complexd, 16, 1>;

/// Liouvillian superoperator for one tripod parameter set, in Gamma units.
///
/// When the sigma+ laser is off (omega_m1 == 0) but the Lambda legs are
/// driven, the |-1> level is a pure population trap: nothing drives out of
/// it, so the four-level steady state degenerates into
/// span{|-1><-1|, Lambda steady state}. In that case the model switches to
/// the closed Lambda convention: decay is branched equally (gamma/2 each)
/// into |0> and |1> only, and the steady-state solve runs on the
/// (|0>,|1>,|e>) block. This matches the effective three-level system the
/// weak-probe formulas describe. The switch is on exact omega_m1 == 0 with
/// omega_0 > 0 or omega_1 > 0; the resulting discontinuity against
/// omega_m1 -> 0+ is physical (an arbitrarily weak sigma+ leg eventually
/// empties |-1>, zero drive never does). With every laser off the physical
/// three-channel decay is kept, so plain spontaneous emission stays exact.
struct Liouvillian {
    Matrix16cd matrix = Matrix16cd::Zero();
    TripodParams params;
    double decay = 1.0;             // Gamma in internal units (1 = physical)
    bool lambda_restricted = false; // omega_m1 == 0 convention active
};

/// Builds the Liouvillian. `decay` scales the dissipator in Gamma units;
/// the default 1.0 is the physical linewidth, 0 gives the bare commutator
/// superoperator (useful for closed-system checks).
Liouvillian build_liouvillian(const TripodParams& p, double decay = 1.0);

/// Steady state of l: solves the bordered system {L vec(rho) = 0, tr rho = 1}
/// by least squares and verifies the residual ||L vec(rho)|| < 1e-10.
/// Throws NonUniqueSteadyState when the null space of the active block has
/// dimension > 1 (e.g. all lasers off, or decay == 0) and NoConvergence if
/// the residual check fails.
DensityMatrix solve_steady_state(const Liouvillian& l);

/// Step size used by the fixed-step integrator: 0.002 / max(Gamma, ||H||).
double default_step(const Liouvillian& l);

/// Fixed-step 4th-order (classical Runge-Kutta) propagation of rho0 for
/// time t. dt <= 0 selects default_step(l). Throws StepTooLarge when
/// dt * ||L|| exceeds the stability margin.
DensityMatrix evolve(const DensityMatrix& rho0, const Liouvillian& l, double t,
                     double dt = 0.0);

/// Excited-state population of the steady state, as a function of probe
/// detuning.
struct AbsorptionCurve {
    std::vector<double> detunings; // delta_0 grid, units of Gamma
    std::vector<double> rho_ee;    // in [0,1]; NaN where a point failed
    std::vector<std::pair<std::size_t, std::string>> failures;
};

/// Steady-state rho_ee over a delta_0 grid; per-point solver failures are
/// recorded in `failures` (value NaN) rather than aborting the sweep.
AbsorptionCurve absorption_spectrum(const TripodParams& p,
                                    const std::vector<double>& delta0_grid);

/// Convenience grid: `count` equally spaced points on [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t count);

/// Weak-probe analytic excited-state population of the closed Lambda system
/// (sigma+ leg ignored), units of Gamma, equal decay branching:
///
///   rho_ee = 4 Delta^2 Omega_0^2 Omega_1^2 / Z,   Delta = delta_0 - delta_1,
///   Z = 8 Delta^2 Omega_0^2 Omega_1^2 + 2 Delta^2 Omega^2
///       - 4 delta_0 Delta Omega_1^4 + Omega^6 / 2
///       + 8 Delta^2 (delta_1^2 Omega_0^2 + delta_0^2 Omega_1^2)
///       + 4 delta_1 Delta Omega_0^4
///
/// (exact for that system, all orders in Omega_0). With simplified = true,
/// the lowest-order probe expansion
///   rho_ee = Delta^2 Omega_0^2 / (Delta^2 + 4 (Omega_1^2/4 - Delta delta_0)^2)
/// is used instead. Results are clipped to [0,1]; *clipped reports whether
/// clipping occurred (approximations can stray slightly outside).
double analytic_rho_ee(const TripodParams& p, bool simplified = false,
                       bool* clipped = nullptr);

/// Closed-form cooling bandwidth of the sideband-dominance condition
/// rho_ee(-Delta) >= rho_ee(Delta) - rho_ee(-Delta) applied to the
/// weak-probe lineshape. exact = true evaluates
///   W_C = [2(1+sqrt2) delta_1 + sqrt(delta_1^2 + Omega_1^2)
///          - sqrt((3+2 sqrt2)^2 delta_1^2 + Omega_1^2)] / 2,
/// exact = false the quoted small-Omega approximation
///   W_C ~ (1+sqrt2)/(3/2+sqrt2) * Omega_1^2 / delta_1.
/// The two disagree even at leading order in Omega_1 (the approximation's
/// prefactor does not follow from expanding the bracketed form, whose own
/// small-Omega limit is (sqrt2-1)/2 * Omega_1^2/(2 delta_1)); both are kept
/// verbatim and the discrepancy is deliberate. Requires delta_1 > 0.
double cooling_bandwidth(const TripodParams& p, bool exact = true);

/// Numeric dominance bandwidth measured on the full master equation:
/// rho(w) below is steady-state rho_ee at delta_0 = delta_1 + w, all other
/// parameters from p.
struct DominanceBandwidth {
    double peak_offset; // argmax_w rho(w): bright-peak distance from dark point
    double onset;       // smallest w > 0 with rho(w) >= 2 rho(-w)
    double width;       // peak_offset - onset: the usable cooling band
    double window_max;  // largest w with rho(w) > rho(-w): where cooling stops
};

/// Locates the dominance features by scanning + bisection on steady-state
/// solves. Meaningful in the weak-probe regime (small omega_0, omega_m1 = 0)
/// where the dark/bright structure is sharp.
DominanceBandwidth dominance_bandwidth(const TripodParams& p);

} // namespace eitcool
