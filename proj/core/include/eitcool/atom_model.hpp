#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

#include "eitcool/constants.hpp"
#include "eitcool/errors.hpp"

// Four-level "tripod" atom: three ground states |-1>, |0>, |+1> coupled to a
// single excited state |e> by three lasers (sigma+, pi, sigma-). This header
// fixes the conventions every other module relies on:
//
//   * Basis order is (|-1>, |0>, |+1>, |e>) = indices (0, 1, 2, 3). Always.
//   * Rabi frequencies Omega_i and detunings Delta_i are expressed in units
//     of the excited-state linewidth Gamma; internally Gamma = 1.
//   * Detuning sign: positive = laser blue of its transition. The rotating
//     frame puts the ground-state detunings on the Hamiltonian diagonal and
//     leaves |e> at zero energy.
//   * TripodParams.gamma carries the physical value of Gamma (rad/s) so
//     results can be converted back to laboratory units at the boundary.

namespace eitcool {

using complexd = std::complex<double>;
using Matrix4cd = Eigen::Matrix4cd;

// Index aliases for the fixed basis order.
inline constexpr int idx_m1 = 0; // |-1>
inline constexpr int idx_0 = 1;  // |0>
inline constexpr int idx_p1 = 2; // |+1>
inline constexpr int idx_e = 3;  // |e>

// 4x4 density matrix over the basis above. Physical states are Hermitian,
// unit trace, positive semidefinite; see is_physical_density_matrix().
using DensityMatrix = Matrix4cd;

/// Laser parameters of the tripod system.
///
/// Defaults are the single-ion operating point used throughout: pump
/// Omega_1 = 2 Gamma on |+1>, probe Omega_0 = 0.35 Gamma on |0>, weak
/// sigma+ Omega_m1 = 0.35 * Omega_1 on |-1>, with the pump/probe pair on
/// two-photon resonance at Delta = 4.47 Gamma and the sigma+ leg parked
/// off-resonance at 3.69 Gamma.
struct TripodParams {
    double omega_1 = 2.0;   // pump Rabi frequency, units of Gamma (>= 0)
    double omega_0 = 0.35;  // probe Rabi frequency, units of Gamma (>= 0)
    double omega_m1 = 0.7;  // sigma+ Rabi frequency, units of Gamma (>= 0)
    double delta_1 = 4.47;  // pump detuning, units of Gamma
    double delta_0 = 4.47;  // probe detuning, units of Gamma
    double delta_m1 = 3.69; // sigma+ detuning, units of Gamma

    double gamma = constants::default_gamma;     // physical Gamma, rad/s
    double delta_b = constants::default_delta_b; // Zeeman half-splitting, rad/s

    /// Throws ConfigError if a Rabi frequency is negative, gamma <= 0, or
    /// any field is non-finite.
    void validate() const;

    /// Diagnostic |delta_m1 - (delta_1 - 2 delta_b / gamma)| in units of
    /// Gamma. The magnetic field ties the sigma+ detuning to the pump
    /// detuning; a large value means the parameter set breaks that link.
    /// Reported, never enforced.
    double delta_m1_consistency() const;
};

/// Dressed states of the effective Lambda subsystem (|0>, |1>, |e>), valid
/// on two-photon resonance Delta == delta_0 == delta_1. Vectors are unit
/// norm over the (|0>, |1>, |e>) components with the largest-magnitude
/// component made real positive.
struct DressedSystem {
    double e_dark;         // E_D = Delta
    double e_bright_plus;  // E_B+ = (Delta + Omega')/2
    double e_bright_minus; // E_B- = (Delta - Omega')/2
    Eigen::Vector3d dark_vec;
    Eigen::Vector3d bright_plus_vec;
    Eigen::Vector3d bright_minus_vec;
    double omega_bar;   // Omega  = sqrt(Omega_0^2 + Omega_1^2)
    double omega_prime; // Omega' = sqrt(Delta^2 + Omega^2)
};

/// Effective coupling of the |D> -> |B+> sideband transition.
struct SidebandCoupling {
    double omega_f;   // effective Rabi frequency, units of Gamma (negative)
    double eta;       // Lamb-Dicke parameter of the driven mode
    double splitting; // E_B+ - E_D = (Omega' - Delta)/2, units of Gamma
    double resonance_mismatch; // |splitting - mode_freq|
};

/// Tripod Hamiltonian in the rotating frame, units of Gamma:
/// diag(Delta_m1, Delta_0, Delta_1, 0) with couplings Omega_i/2 between
/// each ground state and |e>. Exactly Hermitian by construction.
Matrix4cd build_hamiltonian(const TripodParams& p);

/// Analytic eigensystem of the Lambda subsystem (sigma+ leg ignored):
///   |D>  =  (Omega_1 |0> - Omega_0 |1>) / Omega
///   |B+> =  (Omega_0 |0> + Omega_1 |1> + (Omega'-Delta)|e>) / sqrt(2 Omega'(Omega'-Delta))
///   |B-> = (-Omega_0 |0> - Omega_1 |1> + (Omega'+Delta)|e>) / sqrt(2 Omega'(Omega'+Delta))
/// with E_D = Delta and E_B+- = (Delta +- Omega')/2.
///
/// Throws DegenerateSystem when Omega_0^2 + Omega_1^2 == 0 and
/// TwoPhotonMismatch when |delta_0 - delta_1| > two_photon_tol (the analytic
/// forms assume exact two-photon resonance; use dressed_states_numeric off
/// resonance).
DressedSystem dressed_states(const TripodParams& p, double two_photon_tol = 1e-6);

/// Numeric counterpart of dressed_states: diagonalizes the 3x3 Lambda block
/// of build_hamiltonian directly. Works for delta_0 != delta_1; energies are
/// sorted so that e_dark is the eigenvalue whose vector has the smallest
/// |e> component. Same sign convention as dressed_states.
DressedSystem dressed_states_numeric(const TripodParams& p);

/// Effective sideband coupling between dark and upper bright state for a
/// motional mode at mode_freq (units of Gamma) probed with Lamb-Dicke
/// parameter eta:
///   Omega_f = -Omega_0 Omega_1 / sqrt(2 Omega' (Omega' + Delta)).
/// The dressed sideband matrix element is eta * Omega_f / 2.
SidebandCoupling effective_sideband_coupling(const TripodParams& p, double eta,
                                             double mode_freq);

/// The three spontaneous-decay collapse operators b_j = sqrt(gamma/3)|j><e|,
/// j in {-1, 0, 1}, in basis order. `gamma` is in whatever unit the caller
/// works in (pass 1.0 for Gamma units).
std::array<Matrix4cd, 3> lindblad_ops(double gamma);

/// True when rho is Hermitian (1e-12 relative), unit trace (1e-12) and has
/// eigenvalues >= -1e-10.
bool is_physical_density_matrix(const DensityMatrix& rho);

} // namespace eitcool
