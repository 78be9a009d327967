#include "eitcool/cooling_limits.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace eitcool {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();
constexpr double inf_v = std::numeric_limits<double>::infinity();

double rho_ee_at(const TripodParams& p, double delta0) {
    TripodParams q = p;
    q.delta_0 = delta0;
    const DensityMatrix rho = solve_steady_state(build_liouvillian(q));
    return rho(idx_e, idx_e).real();
}

} // namespace

CoolingResult phonon_limit(const TripodParams& p, double mode_freq, double eta) {
    if (!(mode_freq > 0.0) || !std::isfinite(mode_freq))
        throw ConfigError("phonon_limit: mode_freq must be > 0");
    CoolingResult r;
    r.mode_freq = mode_freq;
    r.rho_ee_carrier = rho_ee_at(p, p.delta_0);
    r.rho_ee_red = rho_ee_at(p, p.delta_0 - mode_freq);
    r.rho_ee_blue = rho_ee_at(p, p.delta_0 + mode_freq);
    const double denom = r.rho_ee_blue - r.rho_ee_red;
    r.rate = eta * eta * p.gamma * denom;
    // Steady-state populations carry ~1e-10 solver residue; a sideband
    // asymmetry below 1e-13 is indistinguishable from zero, so treat it as
    // not cooling instead of returning a noise-dominated limit.
    r.not_cooling = !(denom > 1e-13);
    r.nbar_ss =
        r.not_cooling ? nan_v : (r.rho_ee_carrier + r.rho_ee_red) / denom;
    return r;
}

CoolingDynamics cooling_dynamics(const TripodParams& p, double eta,
                                 double mode_freq, double nbar0,
                                 const std::vector<double>& t_grid) {
    if (nbar0 < 0.0) throw ConfigError("cooling_dynamics: nbar0 must be >= 0");
    CoolingDynamics d;
    d.limit = phonon_limit(p, mode_freq, eta);
    d.rate = d.limit.rate;
    if (!(d.rate > 0.0)) {
        std::ostringstream os;
        os << "cooling_dynamics: W = " << d.rate << " /s <= 0 (heating)";
        throw NotCooling(os.str());
    }
    d.nbar.reserve(t_grid.size());
    for (const double t : t_grid) {
        if (t < 0.0) throw ConfigError("cooling_dynamics: t must be >= 0");
        d.nbar.push_back(d.limit.nbar_ss +
                         (nbar0 - d.limit.nbar_ss) * std::exp(-d.rate * t));
    }
    return d;
}

ProbeOptimum optimize_probe_detuning(const TripodParams& p, double mode_freq,
                                     double window_lo, double window_hi,
                                     int presample, double tol) {
    if (!(window_hi >= window_lo))
        throw ConfigError("optimize_probe_detuning: window_hi < window_lo");
    if (presample < 1)
        throw ConfigError("optimize_probe_detuning: presample must be >= 1");

    const auto objective = [&](double d0) {
        TripodParams q = p;
        q.delta_0 = d0;
        const CoolingResult r = phonon_limit(q, mode_freq);
        return r.not_cooling ? inf_v : r.nbar_ss;
    };

    if (window_lo == window_hi) {
        const double f = objective(window_lo);
        if (!std::isfinite(f))
            throw NoMinimumInWindow("optimize_probe_detuning: the single "
                                    "window point does not cool");
        return {window_lo, f};
    }

    const auto pts = linspace(window_lo, window_hi,
                              static_cast<std::size_t>(presample));
    std::size_t best = 0;
    double fbest = inf_v;
    std::vector<double> fv(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        fv[i] = objective(pts[i]);
        if (fv[i] < fbest) {
            fbest = fv[i];
            best = i;
        }
    }
    if (!std::isfinite(fbest))
        throw NoMinimumInWindow(
            "optimize_probe_detuning: no cooling anywhere in the window");

    double a = pts[best == 0 ? 0 : best - 1];
    double b = pts[best + 1 < pts.size() ? best + 1 : best];

    // Golden-section descent on [a, b]; infinities (NotCooling) simply lose
    // comparisons, so the bracket contracts onto the finite valley.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    while (b - a > tol) {
        if (f1 > f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = objective(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = objective(x1);
        }
    }
    const double xm = 0.5 * (a + b);
    const double fm = objective(xm);
    // Keep whichever of the bracket evaluations won, in case the midpoint
    // straddles a NotCooling edge.
    ProbeOptimum opt{xm, fm};
    if (f1 < opt.nbar) opt = {x1, f1};
    if (f2 < opt.nbar) opt = {x2, f2};
    if (fbest < opt.nbar) opt = {pts[best], fbest};
    if (!std::isfinite(opt.nbar))
        throw NoMinimumInWindow(
            "optimize_probe_detuning: refinement lost the cooling valley");
    return opt;
}

ScanGrid scan_cooling(const TripodParams& p_base,
                      const std::vector<double>& omega_axis,
                      const std::vector<double>& rabi_axis,
                      const ScanOptions& opt) {
    if (omega_axis.empty() || rabi_axis.empty())
        throw ConfigError("scan_cooling: axes must be nonempty");
    for (const double w : omega_axis)
        if (!(w > 0.0)) throw ConfigError("scan_cooling: omega_axis must be > 0");
    for (const double r : rabi_axis)
        if (!(r >= 0.0)) throw ConfigError("scan_cooling: rabi_axis must be >= 0");

    ScanGrid grid;
    grid.omega_axis = omega_axis;
    grid.rabi_axis = rabi_axis;
    grid.values = Eigen::MatrixXd::Constant(
        static_cast<Eigen::Index>(omega_axis.size()),
        static_cast<Eigen::Index>(rabi_axis.size()), nan_v);
    grid.optimal_delta0.assign(rabi_axis.size(), nan_v);

    const double sigma_ratio =
        p_base.omega_1 > 0.0 ? p_base.omega_m1 / p_base.omega_1 : -1.0;
    const double com = opt.com_freq > 0.0
                           ? opt.com_freq
                           : constants::two_pi * 4.45e6 / p_base.gamma;
    const double wlo =
        opt.window_lo < opt.window_hi ? opt.window_lo : p_base.delta_1 - 0.2;
    const double whi =
        opt.window_lo < opt.window_hi ? opt.window_hi : p_base.delta_1 + 0.8;

    std::atomic<std::size_t> next{0};
    std::atomic<int> failures{0};

    const auto column = [&](std::size_t j) {
        TripodParams p = p_base;
        p.omega_1 = rabi_axis[j];
        if (sigma_ratio >= 0.0) p.omega_m1 = sigma_ratio * rabi_axis[j];
        if (opt.optimize_probe) {
            try {
                const ProbeOptimum po =
                    optimize_probe_detuning(p, com, wlo, whi, opt.presample);
                p.delta_0 = po.delta0;
                grid.optimal_delta0[j] = po.delta0;
            } catch (const Error&) {
                failures.fetch_add(1, std::memory_order_relaxed);
                return; // column stays NaN
            }
        }
        for (std::size_t i = 0; i < omega_axis.size(); ++i) {
            try {
                const CoolingResult r = phonon_limit(p, omega_axis[i]);
                if (!r.not_cooling)
                    grid.values(static_cast<Eigen::Index>(i),
                                static_cast<Eigen::Index>(j)) = r.nbar_ss;
            } catch (const Error&) {
                failures.fetch_add(1, std::memory_order_relaxed);
            }
        }
    };

    unsigned jobs = opt.jobs ? opt.jobs : std::thread::hardware_concurrency();
    jobs = std::max(1u, std::min<unsigned>(
                            jobs, static_cast<unsigned>(rabi_axis.size())));
    if (jobs == 1) {
        for (std::size_t j = 0; j < rabi_axis.size(); ++j) column(j);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (unsigned k = 0; k < jobs; ++k)
            pool.emplace_back([&] {
                for (std::size_t j = next.fetch_add(1);
                     j < rabi_axis.size(); j = next.fetch_add(1))
                    column(j);
            });
        for (auto& th : pool) th.join();
    }
    grid.failures = failures.load();
    return grid;
}

} // namespace eitcool
