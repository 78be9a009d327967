#include "eitcool/ion_chain.hpp"

#include <cmath>
#include <sstream>

namespace eitcool {

namespace {

// Scaled axial potential: U(u) = sum u_i^2 / 2 + sum_{i<j} 1/|u_i - u_j|.
double scaled_cost(const Eigen::VectorXd& u) {
    double c = 0.5 * u.squaredNorm();
    const int n = static_cast<int>(u.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) c += 1.0 / (u[j] - u[i]);
    return c;
}

Eigen::VectorXd scaled_grad(const Eigen::VectorXd& u) {
    const int n = static_cast<int>(u.size());
    Eigen::VectorXd g = u;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = u[i] - u[j];
            g[i] -= (d > 0.0 ? 1.0 : -1.0) / (d * d);
        }
    return g;
}

bool ascending(const Eigen::VectorXd& u) {
    for (int i = 1; i < u.size(); ++i)
        if (!(u[i] > u[i - 1])) return false;
    return true;
}

// Scaled equilibrium positions, ascending.
Eigen::VectorXd scaled_equilibrium(int n) {
    if (n == 1) return Eigen::VectorXd::Zero(1);

    // Seed with the empirical uniform spacing of a harmonic chain.
    const double spacing = 2.018 / std::pow(static_cast<double>(n), 0.559);
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i)
        u[i] = spacing * (i - 0.5 * (n - 1));

    double cost = scaled_cost(u);
    for (int iter = 0; iter < 200; ++iter) {
        const Eigen::VectorXd g = scaled_grad(u);
        if (g.norm() < 1e-13) break;

        Eigen::MatrixXd hess = Eigen::MatrixXd::Identity(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const double d = std::abs(u[i] - u[j]);
                const double w = 2.0 / (d * d * d);
                hess(i, i) += w;
                hess(i, j) -= w;
            }
        const Eigen::VectorXd step = hess.ldlt().solve(-g);

        // Damp until the step keeps the ordering and lowers the cost. Near
        // the minimum the cost decrease drops under its own rounding noise
        // while the force is still finite, so a shrinking gradient norm also
        // counts as progress there.
        double t = 1.0;
        bool accepted = false;
        for (int k = 0; k < 50; ++k, t *= 0.5) {
            const Eigen::VectorXd trial = u + t * step;
            if (!ascending(trial)) continue;
            const double trial_cost = scaled_cost(trial);
            if (trial_cost <= cost ||
                scaled_grad(trial).norm() < 0.9 * g.norm()) {
                u = trial;
                cost = trial_cost;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }

    if (scaled_grad(u).norm() >= 1e-12) {
        std::ostringstream os;
        os << "equilibrium_positions: force residual "
           << scaled_grad(u).norm() << " for n = " << n;
        throw NoConvergence(os.str());
    }
    // Remove the numerically tiny asymmetry so positions mirror exactly.
    Eigen::VectorXd sym(n);
    for (int i = 0; i < n; ++i) sym[i] = 0.5 * (u[i] - u[n - 1 - i]);
    return sym;
}

// Scaled transverse Hessian eigensystem for one branch: eigenvalues of
// A_ii = (w_t/w_ax)^2 - sum_k 1/d_ik^3, A_ij = 1/d_ij^3.
void branch_modes(const Eigen::VectorXd& u, double wt_over_wax,
                  Eigen::VectorXd& lambda, Eigen::MatrixXd& vecs) {
    const int n = static_cast<int>(u.size());
    Eigen::MatrixXd a =
        wt_over_wax * wt_over_wax * Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = std::abs(u[i] - u[j]);
            const double w = 1.0 / (d * d * d);
            a(i, i) -= w;
            a(i, j) += w;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    lambda = es.eigenvalues(); // ascending
    vecs = es.eigenvectors();
}

void fill_branch(const Eigen::VectorXd& u, double wt, double wax,
                 std::vector<double>& freqs, Eigen::MatrixXd& out_vecs,
                 const char* branch_name) {
    Eigen::VectorXd lambda;
    Eigen::MatrixXd vecs;
    branch_modes(u, wt / wax, lambda, vecs);
    const int n = static_cast<int>(u.size());
    if (lambda[0] <= 0.0) {
        std::ostringstream os;
        os << "transverse_modes: " << branch_name
           << " branch unstable (lowest squared frequency "
           << lambda[0] * wax * wax << " (rad/s)^2); zigzag transition";
        throw UnstableChain(os.str());
    }
    freqs.resize(n);
    out_vecs.resize(n, n);
    for (int m = 0; m < n; ++m) {
        const int src = n - 1 - m; // descending frequency order
        freqs[m] = wax * std::sqrt(lambda[src]);
        Eigen::VectorXd v = vecs.col(src);
        int imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v[imax] < 0.0) v = -v;
        out_vecs.col(m) = v;
    }
}

} // namespace

void TrapConfig::validate() const {
    if (n_ions < 1) throw ConfigError("TrapConfig: n_ions must be >= 1");
    if (!(omega_ax > 0.0) || !(omega_beta > omega_ax) ||
        !(omega_alpha > omega_beta))
        throw ConfigError(
            "TrapConfig: need omega_alpha > omega_beta > omega_ax > 0 "
            "(linear-chain regime)");
    if (!(ion_mass > 0.0)) throw ConfigError("TrapConfig: ion_mass must be > 0");
    if (!(wavelength_eit > 0.0) || !(wavelength_raman > 0.0))
        throw ConfigError("TrapConfig: wavelengths must be > 0");
    if (!std::isfinite(beam_angle_theta))
        throw ConfigError("TrapConfig: beam angle must be finite");
}

double chain_length_scale(const TrapConfig& cfg) {
    cfg.validate();
    namespace c = constants;
    const double e2 = c::elementary_charge * c::elementary_charge;
    return std::cbrt(e2 / (4.0 * c::pi * c::epsilon0 * cfg.ion_mass *
                           cfg.omega_ax * cfg.omega_ax));
}

std::vector<double> equilibrium_positions(const TrapConfig& cfg) {
    cfg.validate();
    const Eigen::VectorXd u = scaled_equilibrium(cfg.n_ions);
    const double scale = chain_length_scale(cfg);
    std::vector<double> x(u.size());
    for (int i = 0; i < u.size(); ++i) x[i] = scale * u[i];
    return x;
}

ModeSpectrum transverse_modes(const TrapConfig& cfg) {
    cfg.validate();
    const Eigen::VectorXd u = scaled_equilibrium(cfg.n_ions);
    ModeSpectrum s;
    fill_branch(u, cfg.omega_alpha, cfg.omega_ax, s.freq_alpha, s.vec_alpha,
                "alpha");
    fill_branch(u, cfg.omega_beta, cfg.omega_ax, s.freq_beta, s.vec_beta,
                "beta");
    return s;
}

double lamb_dicke_single(double k_eff, double mass, double omega) {
    if (!(mass > 0.0) || !(omega > 0.0))
        throw ConfigError("lamb_dicke_single: mass and omega must be > 0");
    return std::sqrt(constants::hbar * k_eff * k_eff / (2.0 * mass * omega));
}

ModeSpectrum lamb_dicke_factors(ModeSpectrum s, const TrapConfig& cfg,
                                Beam beam) {
    cfg.validate();
    const double k =
        beam == Beam::eit
            ? constants::two_pi / cfg.wavelength_eit
            : 2.0 * constants::two_pi / cfg.wavelength_raman;
    const double k_alpha = k * std::sin(cfg.beam_angle_theta);
    const double k_beta = k * std::cos(cfg.beam_angle_theta);

    const auto fill = [&](const std::vector<double>& freqs,
                          const Eigen::MatrixXd& vecs, double k_dir) {
        const int n = static_cast<int>(freqs.size());
        Eigen::MatrixXd eta(n, n);
        for (int m = 0; m < n; ++m) {
            const double eta0 = k_dir == 0.0
                                    ? 0.0
                                    : lamb_dicke_single(k_dir, cfg.ion_mass,
                                                        freqs[m]);
            eta.col(m) = eta0 * vecs.col(m);
        }
        return eta;
    };
    s.eta_alpha = fill(s.freq_alpha, s.vec_alpha, k_alpha);
    s.eta_beta = fill(s.freq_beta, s.vec_beta, k_beta);
    s.eta_beam = beam;
    return s;
}

double zigzag_margin(const TrapConfig& cfg) {
    cfg.validate();
    const Eigen::VectorXd u = scaled_equilibrium(cfg.n_ions);
    Eigen::VectorXd lambda;
    Eigen::MatrixXd vecs;
    branch_modes(u, cfg.omega_beta / cfg.omega_ax, lambda, vecs);
    return lambda[0] * cfg.omega_ax * cfg.omega_ax /
           (cfg.omega_beta * cfg.omega_beta);
}

} // namespace eitcool
