#include "eitcool/atom_model.hpp"

#include <cmath>
#include <sstream>

namespace eitcool {

namespace {

bool all_finite(const TripodParams& p) {
    return std::isfinite(p.omega_1) && std::isfinite(p.omega_0) &&
           std::isfinite(p.omega_m1) && std::isfinite(p.delta_1) &&
           std::isfinite(p.delta_0) && std::isfinite(p.delta_m1) &&
           std::isfinite(p.gamma) && std::isfinite(p.delta_b);
}

// Fix the arbitrary overall sign: largest-magnitude component real positive.
Eigen::Vector3d canonical_sign(Eigen::Vector3d v) {
    int imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0.0) v = -v;
    return v;
}

} // namespace

void TripodParams::validate() const {
    if (!all_finite(*this)) throw ConfigError("tripod parameters must be finite");
    if (omega_1 < 0.0 || omega_0 < 0.0 || omega_m1 < 0.0)
        throw ConfigError("Rabi frequencies must be >= 0");
    if (gamma <= 0.0) throw ConfigError("gamma must be > 0");
}

double TripodParams::delta_m1_consistency() const {
    return std::abs(delta_m1 - (delta_1 - 2.0 * delta_b / gamma));
}

Matrix4cd build_hamiltonian(const TripodParams& p) {
    p.validate();
    Matrix4cd h = Matrix4cd::Zero();
    h(idx_m1, idx_m1) = p.delta_m1;
    h(idx_0, idx_0) = p.delta_0;
    h(idx_p1, idx_p1) = p.delta_1;
    // |e> stays at zero energy in this rotating frame.
    h(idx_m1, idx_e) = 0.5 * p.omega_m1;
    h(idx_0, idx_e) = 0.5 * p.omega_0;
    h(idx_p1, idx_e) = 0.5 * p.omega_1;
    h(idx_e, idx_m1) = 0.5 * p.omega_m1;
    h(idx_e, idx_0) = 0.5 * p.omega_0;
    h(idx_e, idx_p1) = 0.5 * p.omega_1;
    return h;
}

DressedSystem dressed_states(const TripodParams& p, double two_photon_tol) {
    p.validate();
    const double om0 = p.omega_0, om1 = p.omega_1;
    const double om_sq = om0 * om0 + om1 * om1;
    if (om_sq == 0.0)
        throw DegenerateSystem("dressed states undefined: Omega_0 = Omega_1 = 0");
    if (std::abs(p.delta_0 - p.delta_1) > two_photon_tol) {
        std::ostringstream os;
        os << "analytic dressed states need delta_0 == delta_1 (|diff| = "
           << std::abs(p.delta_0 - p.delta_1) << " > tol " << two_photon_tol << ")";
        throw TwoPhotonMismatch(os.str());
    }
    const double delta = 0.5 * (p.delta_0 + p.delta_1);
    const double om = std::sqrt(om_sq);
    const double omp = std::sqrt(delta * delta + om_sq);

    DressedSystem d;
    d.omega_bar = om;
    d.omega_prime = omp;
    d.e_dark = delta;
    d.e_bright_plus = 0.5 * (delta + omp);
    d.e_bright_minus = 0.5 * (delta - omp);

    d.dark_vec = canonical_sign(Eigen::Vector3d(om1 / om, -om0 / om, 0.0));
    // Omega' -+ Delta can underflow only when Omega -> 0, excluded above.
    const double np = std::sqrt(2.0 * omp * (omp - delta));
    const double nm = std::sqrt(2.0 * omp * (omp + delta));
    d.bright_plus_vec =
        canonical_sign(Eigen::Vector3d(om0 / np, om1 / np, (omp - delta) / np));
    d.bright_minus_vec =
        canonical_sign(Eigen::Vector3d(-om0 / nm, -om1 / nm, (omp + delta) / nm));
    return d;
}

DressedSystem dressed_states_numeric(const TripodParams& p) {
    p.validate();
    if (p.omega_0 == 0.0 && p.omega_1 == 0.0)
        throw DegenerateSystem("dressed states undefined: Omega_0 = Omega_1 = 0");

    Eigen::Matrix3d h = Eigen::Matrix3d::Zero(); // basis (|0>, |1>, |e>)
    h(0, 0) = p.delta_0;
    h(1, 1) = p.delta_1;
    h(0, 2) = h(2, 0) = 0.5 * p.omega_0;
    h(1, 2) = h(2, 1) = 0.5 * p.omega_1;

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h);
    const Eigen::Vector3d ev = es.eigenvalues(); // ascending
    const Eigen::Matrix3d vecs = es.eigenvectors();

    // The dark state is the eigenvector with the least excited-state
    // admixture; the remaining two are bright minus/plus by energy order.
    int dark = 0;
    Eigen::Vector3d e_amp = vecs.row(2).cwiseAbs();
    e_amp.minCoeff(&dark);
    int rest[2], k = 0;
    for (int i = 0; i < 3; ++i)
        if (i != dark) rest[k++] = i;
    const int minus = ev[rest[0]] <= ev[rest[1]] ? rest[0] : rest[1];
    const int plus = minus == rest[0] ? rest[1] : rest[0];

    DressedSystem d;
    d.omega_bar = std::sqrt(p.omega_0 * p.omega_0 + p.omega_1 * p.omega_1);
    const double delta = 0.5 * (p.delta_0 + p.delta_1);
    d.omega_prime = std::sqrt(delta * delta + d.omega_bar * d.omega_bar);
    d.e_dark = ev[dark];
    d.e_bright_plus = ev[plus];
    d.e_bright_minus = ev[minus];
    d.dark_vec = canonical_sign(vecs.col(dark));
    d.bright_plus_vec = canonical_sign(vecs.col(plus));
    d.bright_minus_vec = canonical_sign(vecs.col(minus));
    return d;
}

SidebandCoupling effective_sideband_coupling(const TripodParams& p, double eta,
                                             double mode_freq) {
    const DressedSystem d = dressed_states(p);
    const double delta = d.e_dark;
    SidebandCoupling c;
    // Matrix element of the pump sideband between |D> and |B+>:
    // <D|1><e|B+> * Omega_1 = -(Omega_0 Omega_1 / Omega) * sqrt((Omega'-Delta)/(2 Omega'))
    // which simplifies to the closed form below.
    c.omega_f = -p.omega_0 * p.omega_1 /
                std::sqrt(2.0 * d.omega_prime * (d.omega_prime + delta));
    c.eta = eta;
    c.splitting = 0.5 * (d.omega_prime - delta);
    c.resonance_mismatch = std::abs(c.splitting - mode_freq);
    return c;
}

std::array<Matrix4cd, 3> lindblad_ops(double gamma) {
    if (gamma <= 0.0) throw ConfigError("lindblad_ops: gamma must be > 0");
    const double amp = std::sqrt(gamma / 3.0);
    std::array<Matrix4cd, 3> ops;
    const int ground[3] = {idx_m1, idx_0, idx_p1};
    for (int j = 0; j < 3; ++j) {
        ops[j] = Matrix4cd::Zero();
        ops[j](ground[j], idx_e) = amp;
    }
    return ops;
}

bool is_physical_density_matrix(const DensityMatrix& rho) {
    const double scale = std::max(1.0, rho.norm());
    if ((rho - rho.adjoint()).norm() > 1e-12 * scale) return false;
    if (std::abs(rho.trace().real() - 1.0) > 1e-12 ||
        std::abs(rho.trace().imag()) > 1e-12)
        return false;
    Eigen::SelfAdjointEigenSolver<Matrix4cd> es(rho);
    return es.eigenvalues().minCoeff() >= -1e-10;
}

} // namespace eitcool
