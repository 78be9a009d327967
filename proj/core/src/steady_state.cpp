#include "eitcool/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace eitcool {

namespace {

constexpr complexd I_UNIT{0.0, 1.0};

// Kronecker product with K(4p+q, 4r+s) = a(p,r) b(q,s), the convention for
// which vec(A X B) = kron(B^T, A) vec(X) under column stacking.
Matrix16cd kron(const Matrix4cd& a, const Matrix4cd& b) {
    Matrix16cd k;
    for (int p = 0; p < 4; ++p)
        for (int r = 0; r < 4; ++r)
            k.block<4, 4>(4 * p, 4 * r) = a(p, r) * b;
    return k;
}

Vector16cd vec(const DensityMatrix& rho) {
    return Eigen::Map<const Vector16cd>(rho.data());
}

DensityMatrix unvec(const Vector16cd& v) {
    return Eigen::Map<const Matrix4cd>(v.data());
}

void add_dissipator(Matrix16cd& l, const Matrix4cd& b) {
    const Matrix4cd id = Matrix4cd::Identity();
    const Matrix4cd bdb = b.adjoint() * b;
    l += kron(b.conjugate(), b) - 0.5 * kron(id, bdb) -
         0.5 * kron(bdb.transpose(), id);
}

// vec-space indices of the (|0>,|1>,|e>) block, i.e. row + 4*col for
// row, col in {1,2,3}.
std::vector<int> lambda_block_indices() {
    std::vector<int> idx;
    for (int c = 1; c < 4; ++c)
        for (int r = 1; r < 4; ++r)
            idx.push_back(r + 4 * c);
    return idx;
}

// Golden-section maximizer of f on [a, b] (unimodal assumption).
template <typename F>
double golden_max(F&& f, double a, double b, double tol) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

// Bisection for a sign change of f on [a, b], f(a) and f(b) of opposite sign.
template <typename F>
double bisect(F&& f, double a, double b, double fa, int iters = 90) {
    for (int i = 0; i < iters && b - a > 1e-14 * std::max(1.0, std::abs(b));
         ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

} // namespace

Liouvillian build_liouvillian(const TripodParams& p, double decay) {
    p.validate();
    if (decay < 0.0 || !std::isfinite(decay))
        throw ConfigError("build_liouvillian: decay must be finite and >= 0");

    Liouvillian l;
    l.params = p;
    l.decay = decay;

    const Matrix4cd h = build_hamiltonian(p);
    const Matrix4cd id = Matrix4cd::Identity();
    l.matrix = -I_UNIT * (kron(id, h) - kron(h.transpose(), id));

    if (decay > 0.0) {
        if (p.omega_m1 == 0.0 && (p.omega_0 > 0.0 || p.omega_1 > 0.0)) {
            // Closed Lambda convention (see header): equal branching into the
            // two driven ground states only.
            l.lambda_restricted = true;
            const double amp = std::sqrt(decay / 2.0);
            for (int g : {idx_0, idx_p1}) {
                Matrix4cd b = Matrix4cd::Zero();
                b(g, idx_e) = amp;
                add_dissipator(l.matrix, b);
            }
        } else {
            for (const Matrix4cd& b : lindblad_ops(decay))
                add_dissipator(l.matrix, b);
        }
    }
    return l;
}

DensityMatrix solve_steady_state(const Liouvillian& l) {
    std::vector<int> idx;
    if (l.lambda_restricted)
        idx = lambda_block_indices();
    else
        for (int i = 0; i < 16; ++i) idx.push_back(i);
    const int n = static_cast<int>(idx.size());

    Eigen::MatrixXcd sub(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sub(i, j) = l.matrix(idx[i], idx[j]);

    // Uniqueness: a physical steady state is the 1-D null space of the
    // active block. Two near-zero singular values mean a degenerate steady
    // manifold (all lasers off, decay = 0, ...earlier caught here).
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sub);
    const auto& sv = svd.singularValues();
    const double thresh = 1e-9 * std::max(sv(0), 1e-12);
    int nullity = 0;
    for (int i = 0; i < n; ++i)
        if (sv(i) < thresh) ++nullity;
    if (nullity != 1) {
        std::ostringstream os;
        os << "steady state not unique: null space dimension " << nullity
           << " (singular values below " << thresh << ")";
        throw NonUniqueSteadyState(os.str());
    }

    // Bordered least squares: the n Liouvillian rows plus the trace row.
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n + 1, n);
    a.topRows(n) = sub;
    for (int j = 0; j < n; ++j) {
        const int r = idx[j] % 4, c = idx[j] / 4;
        if (r == c) a(n, j) = 1.0;
    }
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n + 1);
    rhs(n) = 1.0;
    const Eigen::VectorXcd x = a.colPivHouseholderQr().solve(rhs);

    Vector16cd v = Vector16cd::Zero();
    for (int i = 0; i < n; ++i) v(idx[i]) = x(i);

    DensityMatrix rho = unvec(v);
    rho = 0.5 * (rho + rho.adjoint()).eval(); // enforce exact Hermiticity
    rho /= rho.trace().real();

    const double residual = (l.matrix * vec(rho)).norm();
    if (residual > 1e-10) {
        std::ostringstream os;
        os << "steady-state residual " << residual << " exceeds 1e-10";
        throw NoConvergence(os.str());
    }
    return rho;
}

double default_step(const Liouvillian& l) {
    const Matrix4cd h = build_hamiltonian(l.params);
    Eigen::SelfAdjointEigenSolver<Matrix4cd> es(h);
    const double hnorm = es.eigenvalues().cwiseAbs().maxCoeff();
    return 0.002 / std::max(std::max(1.0, l.decay), hnorm);
}

DensityMatrix evolve(const DensityMatrix& rho0, const Liouvillian& l, double t,
                     double dt) {
    if (t < 0.0 || !std::isfinite(t)) throw ConfigError("evolve: t must be >= 0");
    if (dt <= 0.0) dt = default_step(l);
    if (t == 0.0) return rho0;

    // Conservative RK4 stability bound on the row-sum norm.
    const double lnorm = l.matrix.cwiseAbs().rowwise().sum().maxCoeff();
    if (dt * lnorm > 2.5) {
        std::ostringstream os;
        os << "evolve: dt * ||L|| = " << dt * lnorm << " > 2.5 (unstable step)";
        throw StepTooLarge(os.str());
    }

    Vector16cd v = vec(rho0);
    const auto rk4 = [&](double h) {
        const Vector16cd k1 = l.matrix * v;
        const Vector16cd k2 = l.matrix * (v + 0.5 * h * k1);
        const Vector16cd k3 = l.matrix * (v + 0.5 * h * k2);
        const Vector16cd k4 = l.matrix * (v + h * k3);
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };

    const auto steps =
        std::max(1LL, static_cast<long long>(std::ceil(t / dt - 1e-12)));
    for (long long i = 0; i + 1 < steps; ++i) rk4(dt);
    rk4(t - static_cast<double>(steps - 1) * dt); // exact landing on t
    return unvec(v);
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> g;
    g.reserve(count);
    if (count == 1) {
        g.push_back(lo);
        return g;
    }
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
        g.push_back(lo + step * static_cast<double>(i));
    return g;
}

AbsorptionCurve absorption_spectrum(const TripodParams& p,
                                    const std::vector<double>& delta0_grid) {
    if (delta0_grid.empty())
        throw ConfigError("absorption_spectrum: empty detuning grid");
    AbsorptionCurve curve;
    curve.detunings = delta0_grid;
    curve.rho_ee.resize(delta0_grid.size());
    for (std::size_t i = 0; i < delta0_grid.size(); ++i) {
        if (!std::isfinite(delta0_grid[i]))
            throw ConfigError("absorption_spectrum: non-finite grid point");
        TripodParams q = p;
        q.delta_0 = delta0_grid[i];
        try {
            const DensityMatrix rho = solve_steady_state(build_liouvillian(q));
            curve.rho_ee[i] =
                std::clamp(rho(idx_e, idx_e).real(), 0.0, 1.0);
        } catch (const Error& e) {
            curve.rho_ee[i] = std::numeric_limits<double>::quiet_NaN();
            curve.failures.emplace_back(i, e.what());
        }
    }
    return curve;
}

double analytic_rho_ee(const TripodParams& p, bool simplified, bool* clipped) {
    p.validate();
    if (clipped) *clipped = false;
    const double om0 = p.omega_0, om1 = p.omega_1;
    const double d0 = p.delta_0, d1 = p.delta_1;
    const double delta = d0 - d1;
    if (delta == 0.0) return 0.0; // the dark state, exactly

    double val;
    if (simplified) {
        const double q = 0.25 * om1 * om1 - delta * d0;
        const double denom = delta * delta + 4.0 * q * q;
        if (denom == 0.0) return 0.0;
        val = delta * delta * om0 * om0 / denom;
    } else {
        const double om2 = om0 * om0 + om1 * om1;
        const double z = 8.0 * delta * delta * om0 * om0 * om1 * om1 +
                         2.0 * delta * delta * om2 -
                         4.0 * d0 * delta * om1 * om1 * om1 * om1 +
                         0.5 * om2 * om2 * om2 +
                         8.0 * delta * delta *
                             (d1 * d1 * om0 * om0 + d0 * d0 * om1 * om1) +
                         4.0 * d1 * delta * om0 * om0 * om0 * om0;
        if (z == 0.0) return 0.0;
        val = 4.0 * delta * delta * om0 * om0 * om1 * om1 / z;
    }

    if (val < 0.0) {
        if (clipped) *clipped = true;
        return 0.0;
    }
    if (val > 1.0) {
        if (clipped) *clipped = true;
        return 1.0;
    }
    return val;
}

double cooling_bandwidth(const TripodParams& p, bool exact) {
    if (!(p.delta_1 > 0.0))
        throw ConfigError("cooling_bandwidth: delta_1 must be > 0");
    const double sqrt2 = std::sqrt(2.0);
    const double d1 = p.delta_1, om1 = p.omega_1;
    if (exact) {
        const double a = (3.0 + 2.0 * sqrt2) * d1;
        return 0.5 * (2.0 * (1.0 + sqrt2) * d1 + std::hypot(d1, om1) -
                      std::sqrt(a * a + om1 * om1));
    }
    return (1.0 + sqrt2) / (1.5 + sqrt2) * om1 * om1 / d1;
}

DominanceBandwidth dominance_bandwidth(const TripodParams& p) {
    if (!(p.delta_1 > 0.0) || !(p.omega_1 > 0.0) || !(p.omega_0 > 0.0))
        throw ConfigError(
            "dominance_bandwidth: needs delta_1 > 0, omega_1 > 0, omega_0 > 0");

    const auto rho = [&](double w) {
        TripodParams q = p;
        q.delta_0 = p.delta_1 + w;
        const DensityMatrix r = solve_steady_state(build_liouvillian(q));
        return r(idx_e, idx_e).real();
    };

    // Bright-peak location, seeded by the weak-probe estimate.
    const double est = 0.5 * (std::hypot(p.delta_1, p.omega_1) - p.delta_1);
    double best_x = est, best_f = -1.0;
    const auto coarse = linspace(est / 20.0, 5.0 * est, 160);
    std::vector<double> fv(coarse.size());
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        fv[i] = rho(coarse[i]);
        if (fv[i] > best_f) {
            best_f = fv[i];
            best_x = coarse[i];
        }
    }
    const double step = coarse[1] - coarse[0];
    DominanceBandwidth out;
    out.peak_offset =
        golden_max(rho, std::max(1e-9, best_x - step), best_x + step, 1e-9);

    // Dominance onset: first w where the cooling sideband is at least twice
    // the heating sideband.
    const auto g = [&](double w) { return rho(w) - 2.0 * rho(-w); };
    out.onset = 0.0;
    const auto scan = linspace(out.peak_offset / 400.0, out.peak_offset, 256);
    double prev = g(scan[0]);
    if (prev < 0.0) {
        bool found = false;
        for (std::size_t i = 1; i < scan.size(); ++i) {
            const double cur = g(scan[i]);
            if (cur >= 0.0) {
                out.onset = bisect(g, scan[i - 1], scan[i], prev);
                found = true;
                break;
            }
            prev = cur;
        }
        if (!found) // never dominated: degenerate, report zero-width band
            out.onset = out.peak_offset;
    }
    out.width = out.peak_offset - out.onset;

    // Upper edge of the cooling window: where the sidebands balance again.
    const auto h = [&](double w) { return rho(w) - rho(-w); };
    out.window_max = std::numeric_limits<double>::quiet_NaN();
    const double hi = std::max(3.0 * p.omega_1, 2.0 * out.peak_offset);
    const auto scan2 = linspace(out.peak_offset, hi, 200);
    prev = h(scan2[0]);
    for (std::size_t i = 1; i < scan2.size(); ++i) {
        const double cur = h(scan2[i]);
        if (cur < 0.0) {
            out.window_max = bisect(h, scan2[i - 1], scan2[i], prev);
            break;
        }
        prev = cur;
    }
    return out;
}

} // namespace eitcool
