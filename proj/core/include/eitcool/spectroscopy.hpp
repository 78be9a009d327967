#pragma once

#include <vector>

#include "eitcool/ion_chain.hpp"

// Thermometry toolbox: sideband-ratio conversion, synthetic sideband
// spectra, AC-Stark calibration of Rabi frequencies, Debye-Waller-suppressed
// carrier flopping, and the least-squares fits used to reduce measured data.

namespace eitcool {

/// Mean phonon number from the lower/upper sideband ratio R = n/(n+1):
/// nbar = R / (1 - R). Throws RatioOutOfRange unless 0 <= r < 1 (a ratio at
/// or above one cannot come from a thermal state and usually signals
/// measurement noise).
double ratio_to_nbar(double r);

/// Inverse of ratio_to_nbar: R = nbar / (nbar + 1), nbar >= 0.
double nbar_to_ratio(double nbar);

/// One measured sideband pair reduced to a phonon number.
struct SidebandPair {
    double mode_freq; // rad/s
    double p_lower;   // lower-sideband excitation probability
    double p_upper;   // upper-sideband excitation probability
    double nbar;
    double nbar_err;  // propagated from sigma_p (0 if sigma_p == 0)
};

/// Reduces peak excitations to nbar = R/(1-R) with R = p_lower/p_upper.
/// sigma_p is a common per-peak standard error, propagated linearly.
SidebandPair sideband_pair(double mode_freq, double p_lower, double p_upper,
                           double sigma_p = 0.0);

/// Synthetic sideband spectrum for one probed ion: Gaussian peaks of width
/// `width` at every mode frequency, amplitudes from first-order sideband
/// excitation (eta_m Omega t / 2)^2 scaled by nbar_m (lower) and nbar_m + 1
/// (upper). The detuning grid is the distance from the carrier, so the
/// lower and upper curves share the same axis (the physical peaks sit at
/// -w_m and +w_m). Modes are the concatenation alpha branch then beta
/// branch, each in the spectrum's descending order; `nbars` follows that
/// ordering. Requires lamb_dicke_factors() to have filled the spectrum.
struct SidebandSpectrum {
    std::vector<double> detuning; // rad/s from carrier
    std::vector<double> lower;    // excitation probability in [0,1]
    std::vector<double> upper;
};
SidebandSpectrum sideband_spectrum_model(const ModeSpectrum& s, int ion,
                                         const std::vector<double>& nbars,
                                         double probe_rabi, double duration,
                                         double width,
                                         const std::vector<double>& detuning_grid);

/// Rabi frequency from a measured AC-Stark shift delta_ac = Omega^2 / (4 Delta):
/// Omega = 2 sqrt(delta_ac * Delta). The shift and the detuning must carry
/// the same sign (InconsistentSigns otherwise); delta_ac = 0 gives 0.
double ac_stark_to_rabi(double delta_ac, double detuning);

/// Forward direction of the same relation.
double rabi_to_ac_stark(double rabi, double detuning);

/// Carrier Rabi frequency suppressed by thermal motion in every mode:
/// Omega_bar = Omega * exp(-sum_m eta_m^2 (nbar_m + 1/2)).
double debye_waller_rabi(double base_rabi, const std::vector<double>& etas,
                         const std::vector<double>& nbars);

/// Carrier Rabi flopping of an ion with per-mode couplings `etas` and
/// occupations `nbars`:
///   P(t) = [1 - C(t) cos(Omega_bar t)] / 2
/// with exact contrast C(t) = prod_m [1 + (eta_m^2 nbar_m Omega_bar t)^2]^(-1/2)
/// or, with quadratic = true, the short-time form
/// C(t) = 1 - (Omega_bar t)^2/2 * sum eta^4 nbar^2 (valid while that term is
/// small; it is not clamped, so outside its regime P can leave [0,1]).
std::vector<double> carrier_flop(double base_rabi,
                                 const std::vector<double>& etas,
                                 const std::vector<double>& nbars,
                                 const std::vector<double>& t_grid,
                                 bool quadratic = false);

/// Result of fitting P(t) = [1 - (1 - A (B t)^2) cos(B t)]/2 + P0.
struct RabiFit {
    double a;        // quadratic contrast-decay coefficient
    double b;        // Rabi frequency, same angular unit as 1/t
    double p0;       // baseline offset
    double residual; // RMS residual
};

/// Least-squares Rabi-flop fit. The initial B comes from the dominant peak
/// of the data's discrete spectrum (deterministic; no random restarts).
/// Throws InsufficientData for fewer than 8 samples and FitDiverged when
/// the optimizer fails.
RabiFit fit_rabi(const std::vector<double>& t, const std::vector<double>& p);

/// Result of fitting nbar(t) = nbar_ss + (nbar0 - nbar_ss) exp(-t / tau).
struct CoolingCurveFit {
    double tau;      // 1/e time, same unit as t
    double nbar_ss;
    double nbar0;
    double rate;     // implied initial rate (nbar0 - nbar_ss)/tau
    double residual; // RMS residual
    bool degenerate; // constant data: tau unidentifiable (NaN)
};

/// Exponential-plus-offset cooling-curve fit. Needs >= 4 samples
/// (InsufficientData); constant data is reported as degenerate instead of
/// inventing a time constant.
CoolingCurveFit fit_cooling_curve(const std::vector<double>& t,
                                  const std::vector<double>& nbar);

} // namespace eitcool
