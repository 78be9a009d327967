#pragma once

#include <Eigen/Dense>
#include <vector>

#include "eitcool/constants.hpp"
#include "eitcool/errors.hpp"

// Linear Coulomb-crystal mechanics: equilibrium positions in a harmonic
// axial well, transverse normal modes for both principal axes, and the
// per-ion/per-mode Lamb-Dicke factors of the two beam geometries.
//
// Internally everything is scaled with the standard length
// l = (e^2 / (4 pi eps0 M w_ax^2))^(1/3), so the conditioning does not
// depend on the absolute trap scale.

namespace eitcool {

struct TrapConfig {
    int n_ions = 1;
    double omega_ax = 0.0;    // axial COM, rad/s
    double omega_alpha = 0.0; // higher transverse COM, rad/s
    double omega_beta = 0.0;  // lower transverse COM, rad/s
    double ion_mass = constants::default_ion_mass; // kg
    // Angle between the beam wavevector (difference) and principal axis
    // beta; the alpha axis gets the complementary sin(theta) projection.
    double beam_angle_theta = 40.0 * constants::pi / 180.0;
    double wavelength_eit = constants::default_wavelength_eit;     // m
    double wavelength_raman = constants::default_wavelength_raman; // m

    /// Linear-chain regime requires omega_alpha > omega_beta > omega_ax > 0.
    void validate() const;
};

/// Characteristic length l (meters).
double chain_length_scale(const TrapConfig& cfg);

/// Equilibrium positions along the trap axis, meters, sorted ascending,
/// symmetric about zero. Damped Newton iteration on the scaled potential;
/// throws NoConvergence if the force residual cannot reach 1e-12.
std::vector<double> equilibrium_positions(const TrapConfig& cfg);

enum class Beam { eit, raman };

/// Transverse normal modes of both branches. Frequencies are sorted
/// descending, so index 0 is the COM mode at the trap frequency; eigenvector
/// columns match the frequency order and have their largest-magnitude
/// component positive. The eta matrices are empty until
/// lamb_dicke_factors() fills them.
struct ModeSpectrum {
    std::vector<double> freq_alpha; // rad/s, descending
    std::vector<double> freq_beta;  // rad/s, descending
    Eigen::MatrixXd vec_alpha;      // N x N, column m = mode m
    Eigen::MatrixXd vec_beta;
    Eigen::MatrixXd eta_alpha; // eta(i, m): ion i, mode m
    Eigen::MatrixXd eta_beta;
    Beam eta_beam = Beam::eit;
};

/// Diagonalizes the transverse Hessian about the axial equilibrium for both
/// branches. Throws UnstableChain when any squared mode frequency is <= 0
/// (zigzag transition: the chain is no longer linear).
ModeSpectrum transverse_modes(const TrapConfig& cfg);

/// eta = sqrt(hbar k^2 / (2 M omega)) for a single ion and effective
/// wavevector k.
double lamb_dicke_single(double k_eff, double mass, double omega);

/// Returns a copy of `s` with eta_alpha/eta_beta filled:
/// eta_im = sqrt(hbar k_dir^2 / (2 M w_m)) * b_im, where k_dir projects the
/// beam's effective wavevector onto the branch axis (cos theta on beta,
/// sin theta on alpha). The EIT beam couples with its single-photon
/// wavevector; the Raman pair is counter-propagating, |dk| = 2k.
ModeSpectrum lamb_dicke_factors(ModeSpectrum s, const TrapConfig& cfg,
                                Beam beam);

/// Stability margin of the linear chain: (lowest beta-branch mode)^2 /
/// omega_beta^2. Positive = stable; <= 0 = zigzag. Unlike
/// transverse_modes, never throws on instability (that is the point of
/// asking).
double zigzag_margin(const TrapConfig& cfg);

} // namespace eitcool
