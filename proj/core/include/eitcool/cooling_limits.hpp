#pragma once

#include "eitcool/steady_state.hpp"

// Steady-state phonon limits and cooling rates for one motional mode,
// evaluated from the full master equation. The sidebands of a mode at
// frequency w (units of Gamma) are modeled by re-solving the steady state
// with the probe detuning shifted to delta_0 +- w, all other parameters
// fixed:
//
//   nbar(w) = [rho_ee(d0) + rho_ee(d0 - w)] / [rho_ee(d0 + w) - rho_ee(d0 - w)]
//
// A non-positive denominator means the heating sideband wins: the mode does
// not cool and nbar is undefined (flagged, never fabricated). Denominators
// below 1e-13 — under the steady-state solver's own residue — are treated
// as zero, so exactly balanced sidebands flag deterministically instead of
// following sign noise.

namespace eitcool {

struct CoolingResult {
    double mode_freq;       // units of Gamma
    double nbar_ss;         // steady-state mean phonon number; NaN if not cooling
    double rate;            // cooling rate W in quanta/s (0 unless eta given)
    double rho_ee_carrier;  // rho_ee at delta_0
    double rho_ee_red;      // rho_ee at delta_0 - mode_freq
    double rho_ee_blue;     // rho_ee at delta_0 + mode_freq
    bool not_cooling;
};

/// Sideband balance of one mode. `eta` only feeds the rate estimate
/// W = eta^2 * gamma * (rho_ee_blue - rho_ee_red), quanta per second with
/// gamma taken from p; pass 0 when the rate is not needed.
CoolingResult phonon_limit(const TripodParams& p, double mode_freq,
                           double eta = 0.0);

struct CoolingDynamics {
    CoolingResult limit; // sideband balance used, rate filled in
    double rate;         // W in 1/s
    std::vector<double> nbar; // nbar(t) on the supplied grid
};

/// Rate-equation relaxation nbar(t) = nbar_ss + (nbar0 - nbar_ss) e^{-W t}
/// with t in seconds. This is a desk model: the exponential form matches the
/// fitted experimental decay, and W = eta^2 gamma (rho_blue - rho_red) is an
/// approximate single-mode rate. Throws NotCooling when W <= 0.
CoolingDynamics cooling_dynamics(const TripodParams& p, double eta,
                                 double mode_freq, double nbar0,
                                 const std::vector<double>& t_grid);

struct ProbeOptimum {
    double delta0; // argmin, units of Gamma
    double nbar;   // minimum nbar at mode_freq
};

/// 1-D minimization of phonon_limit over the probe detuning inside
/// [window_lo, window_hi]: coarse presample (presample points) followed by
/// golden-section refinement to `tol` (the absorption curve has a cusp at
/// the dark point, so derivative-based methods are avoided). Cells that do
/// not cool count as +infinity; throws NoMinimumInWindow when every probed
/// detuning heats.
ProbeOptimum optimize_probe_detuning(const TripodParams& p, double mode_freq,
                                     double window_lo, double window_hi,
                                     int presample = 64, double tol = 1e-4);

struct ScanOptions {
    bool optimize_probe = true;
    // COM mode the optimizer targets, units of Gamma. <= 0 selects the
    // default transverse COM at 2 pi x 4.45 MHz converted with p.gamma.
    double com_freq = 0.0;
    // Probe-detuning search window; lo >= hi selects the default
    // [delta_1 - 0.2, delta_1 + 0.8], which brackets the dark resonance and
    // the full bright feature.
    double window_lo = 0.0;
    double window_hi = 0.0;
    int presample = 64;
    unsigned jobs = 0; // 0 = hardware concurrency
};

struct ScanGrid {
    std::vector<double> omega_axis; // mode frequencies, units of Gamma
    std::vector<double> rabi_axis;  // pump Rabi frequencies, units of Gamma
    // nbar_ss with NaN marking not-cooling or failed cells;
    // values(i, j) is omega_axis[i] x rabi_axis[j].
    Eigen::MatrixXd values;
    std::vector<double> optimal_delta0; // per rabi column; NaN if unavailable
    int failures = 0; // solver/optimizer errors (NotCooling flags excluded)
};

/// Phonon-limit heatmap over mode frequency x pump Rabi frequency. For each
/// Omega_1 on rabi_axis the base parameter set is rescaled: omega_1 is set
/// to the axis value and omega_m1 keeps its base ratio to omega_1 (the
/// sigma+ leg tracks the pump in the experimental configurations). With
/// optimize_probe, delta_0 is first tuned per column to minimize nbar at the
/// COM frequency. Columns are evaluated concurrently; results are assembled
/// by index, so output is deterministic.
ScanGrid scan_cooling(const TripodParams& p_base,
                      const std::vector<double>& omega_axis,
                      const std::vector<double>& rabi_axis,
                      const ScanOptions& opt = {});

} // namespace eitcool
