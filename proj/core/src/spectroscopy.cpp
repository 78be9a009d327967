#include "eitcool/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>

#include "eitcool/fitting.hpp"

namespace eitcool {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

void check_same_size(const std::vector<double>& a, const std::vector<double>& b,
                     const char* what) {
    if (a.size() != b.size()) {
        std::ostringstream os;
        os << what << ": size mismatch (" << a.size() << " vs " << b.size()
           << ")";
        throw ConfigError(os.str());
    }
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) /
           static_cast<double>(v.size());
}

// Dominant angular frequency of (t, y) by a dense scan of the discrete
// spectrum, with parabolic refinement of the winning bin. Deterministic.
double dominant_frequency(const std::vector<double>& t,
                          const std::vector<double>& y) {
    const double span = t.back() - t.front();
    if (!(span > 0.0)) throw ConfigError("fit_rabi: zero time span");
    double dt_min = span;
    for (std::size_t i = 1; i < t.size(); ++i)
        dt_min = std::min(dt_min, t[i] - t[i - 1]);
    if (!(dt_min > 0.0))
        throw ConfigError("fit_rabi: time samples must be strictly increasing");

    const double ybar = mean(y);
    const double w_lo = constants::pi / span; // half a cycle across the data
    const double w_hi = constants::pi / dt_min;
    const int k_bins = 1024;

    std::vector<double> power(k_bins);
    int best = 0;
    for (int k = 0; k < k_bins; ++k) {
        const double w =
            w_lo + (w_hi - w_lo) * static_cast<double>(k) / (k_bins - 1);
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t j = 0; j < t.size(); ++j)
            acc += (y[j] - ybar) * std::polar(1.0, -w * t[j]);
        power[k] = std::norm(acc);
        if (power[k] > power[best]) best = k;
    }
    double w_best = w_lo + (w_hi - w_lo) * best / (k_bins - 1);
    if (best > 0 && best + 1 < k_bins) {
        const double dp = 0.5 * (power[best + 1] - power[best - 1]);
        const double d2p =
            power[best + 1] - 2.0 * power[best] + power[best - 1];
        if (d2p < 0.0)
            w_best += (w_hi - w_lo) / (k_bins - 1) * (-dp / d2p);
    }
    return w_best;
}

} // namespace

double ratio_to_nbar(double r) {
    if (!(r >= 0.0) || !std::isfinite(r))
        throw RatioOutOfRange("sideband ratio must be >= 0 and finite");
    if (r >= 1.0) {
        std::ostringstream os;
        os << "sideband ratio " << r
           << " >= 1 is unphysical for a thermal state";
        throw RatioOutOfRange(os.str());
    }
    return r / (1.0 - r);
}

double nbar_to_ratio(double nbar) {
    if (!(nbar >= 0.0) || !std::isfinite(nbar))
        throw ConfigError("nbar_to_ratio: nbar must be >= 0 and finite");
    return nbar / (nbar + 1.0);
}

SidebandPair sideband_pair(double mode_freq, double p_lower, double p_upper,
                           double sigma_p) {
    if (!(p_lower >= 0.0 && p_lower <= 1.0) ||
        !(p_upper >= 0.0 && p_upper <= 1.0))
        throw ConfigError("sideband_pair: excitations must lie in [0,1]");
    if (p_upper <= 0.0)
        throw RatioOutOfRange(
            "sideband_pair: vanishing upper sideband gives no thermal ratio");
    const double r = p_lower / p_upper;
    SidebandPair s;
    s.mode_freq = mode_freq;
    s.p_lower = p_lower;
    s.p_upper = p_upper;
    s.nbar = ratio_to_nbar(r);
    if (sigma_p > 0.0) {
        const double sigma_r =
            sigma_p / p_upper * std::sqrt(1.0 + r * r);
        s.nbar_err = sigma_r / ((1.0 - r) * (1.0 - r));
    } else {
        s.nbar_err = 0.0;
    }
    return s;
}

SidebandSpectrum sideband_spectrum_model(
    const ModeSpectrum& s, int ion, const std::vector<double>& nbars,
    double probe_rabi, double duration, double width,
    const std::vector<double>& detuning_grid) {
    const auto n = static_cast<std::size_t>(s.freq_alpha.size());
    if (s.eta_alpha.size() == 0 || s.eta_beta.size() == 0)
        throw ConfigError(
            "sideband_spectrum_model: spectrum lacks Lamb-Dicke factors "
            "(apply lamb_dicke_factors first)");
    if (ion < 0 || static_cast<std::size_t>(ion) >= n)
        throw ConfigError("sideband_spectrum_model: ion index out of range");
    if (nbars.size() != 2 * n)
        throw ConfigError(
            "sideband_spectrum_model: need one nbar per mode (2N values)");
    if (!(width > 0.0))
        throw ConfigError("sideband_spectrum_model: width must be > 0");
    if (detuning_grid.empty())
        throw ConfigError("sideband_spectrum_model: empty detuning grid");
    for (const double nb : nbars)
        if (!(nb >= 0.0))
            throw ConfigError("sideband_spectrum_model: nbar must be >= 0");

    // Mode list: alpha branch then beta branch, both already descending.
    std::vector<double> freq(2 * n), eta(2 * n);
    for (std::size_t m = 0; m < n; ++m) {
        freq[m] = s.freq_alpha[m];
        eta[m] = s.eta_alpha(ion, static_cast<Eigen::Index>(m));
        freq[n + m] = s.freq_beta[m];
        eta[n + m] = s.eta_beta(ion, static_cast<Eigen::Index>(m));
    }

    SidebandSpectrum out;
    out.detuning = detuning_grid;
    out.lower.assign(detuning_grid.size(), 0.0);
    out.upper.assign(detuning_grid.size(), 0.0);
    for (std::size_t m = 0; m < 2 * n; ++m) {
        const double pulse = 0.5 * eta[m] * probe_rabi * duration;
        const double base = pulse * pulse; // first-order sideband excitation
        for (std::size_t i = 0; i < detuning_grid.size(); ++i) {
            const double d = detuning_grid[i] - freq[m];
            const double shape = std::exp(-0.5 * d * d / (width * width));
            out.lower[i] += base * nbars[m] * shape;
            out.upper[i] += base * (nbars[m] + 1.0) * shape;
        }
    }
    for (auto& v : out.lower) v = std::min(v, 1.0);
    for (auto& v : out.upper) v = std::min(v, 1.0);
    return out;
}

double ac_stark_to_rabi(double delta_ac, double detuning) {
    if (detuning == 0.0)
        throw ConfigError("ac_stark_to_rabi: detuning must be nonzero");
    if (delta_ac == 0.0) return 0.0;
    if ((delta_ac > 0.0) != (detuning > 0.0))
        throw InconsistentSigns(
            "ac_stark_to_rabi: shift and detuning must share a sign");
    return 2.0 * std::sqrt(delta_ac * detuning);
}

double rabi_to_ac_stark(double rabi, double detuning) {
    if (detuning == 0.0)
        throw ConfigError("rabi_to_ac_stark: detuning must be nonzero");
    return rabi * rabi / (4.0 * detuning);
}

double debye_waller_rabi(double base_rabi, const std::vector<double>& etas,
                         const std::vector<double>& nbars) {
    check_same_size(etas, nbars, "debye_waller_rabi");
    double exponent = 0.0;
    for (std::size_t m = 0; m < etas.size(); ++m) {
        if (!(nbars[m] >= 0.0))
            throw ConfigError("debye_waller_rabi: nbar must be >= 0");
        exponent += etas[m] * etas[m] * (nbars[m] + 0.5);
    }
    return base_rabi * std::exp(-exponent);
}

std::vector<double> carrier_flop(double base_rabi,
                                 const std::vector<double>& etas,
                                 const std::vector<double>& nbars,
                                 const std::vector<double>& t_grid,
                                 bool quadratic) {
    check_same_size(etas, nbars, "carrier_flop");
    const double om_bar = debye_waller_rabi(base_rabi, etas, nbars);

    double quad_coeff = 0.0; // sum eta^4 nbar^2 for the short-time contrast
    for (std::size_t m = 0; m < etas.size(); ++m) {
        const double e2n = etas[m] * etas[m] * nbars[m];
        quad_coeff += e2n * e2n;
    }

    std::vector<double> p;
    p.reserve(t_grid.size());
    for (const double t : t_grid) {
        double contrast;
        if (quadratic) {
            const double x = om_bar * t;
            contrast = 1.0 - 0.5 * x * x * quad_coeff;
        } else {
            contrast = 1.0;
            for (std::size_t m = 0; m < etas.size(); ++m) {
                const double a = etas[m] * etas[m] * nbars[m] * om_bar * t;
                contrast /= std::sqrt(1.0 + a * a);
            }
        }
        p.push_back(0.5 * (1.0 - contrast * std::cos(om_bar * t)));
    }
    return p;
}

RabiFit fit_rabi(const std::vector<double>& t, const std::vector<double>& p) {
    check_same_size(t, p, "fit_rabi");
    if (t.size() < 8)
        throw InsufficientData("fit_rabi: need at least 8 samples");

    const double b0 = dominant_frequency(t, p);
    Eigen::VectorXd x0(3);
    x0 << 0.0, b0, mean(p) - 0.5; // A, B, P0

    const auto model = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(t.size());
        for (std::size_t j = 0; j < t.size(); ++j) {
            const double bt = x[1] * t[j];
            const double val =
                0.5 * (1.0 - (1.0 - x[0] * bt * bt) * std::cos(bt)) + x[2];
            r[static_cast<Eigen::Index>(j)] = val - p[j];
        }
        return r;
    };

    const FitSolution sol = levenberg_fit(model, x0);
    RabiFit f;
    f.a = sol.params[0];
    f.b = std::abs(sol.params[1]); // model is even in B
    f.p0 = sol.params[2];
    f.residual = sol.rms_residual;
    return f;
}

CoolingCurveFit fit_cooling_curve(const std::vector<double>& t,
                                  const std::vector<double>& nbar) {
    check_same_size(t, nbar, "fit_cooling_curve");
    if (t.size() < 4)
        throw InsufficientData("fit_cooling_curve: need at least 4 samples");

    const auto [lo, hi] = std::minmax_element(nbar.begin(), nbar.end());
    CoolingCurveFit f;
    if (*hi - *lo <= 1e-12 * std::max(1.0, std::abs(*hi))) {
        // Constant data: the decay time is unidentifiable.
        f.tau = nan_v;
        f.nbar_ss = f.nbar0 = mean(nbar);
        f.rate = 0.0;
        f.residual = 0.0;
        f.degenerate = true;
        return f;
    }

    // Seed: endpoints for the levels, half-decay crossing for tau.
    const double n0 = nbar.front(), nss = nbar.back();
    const double span = t.back() - t.front();
    double tau0 = span / 3.0;
    const double half = nss + 0.5 * (n0 - nss);
    for (std::size_t j = 1; j < t.size(); ++j) {
        const bool crossed =
            n0 > nss ? nbar[j] <= half : nbar[j] >= half;
        if (crossed) {
            tau0 = std::max((t[j] - t.front()) / std::log(2.0), 1e-6 * span);
            break;
        }
    }

    // Fit log(tau) so the decay time stays positive throughout.
    Eigen::VectorXd x0(3);
    x0 << std::log(tau0), nss, n0;
    const auto model = [&](const Eigen::VectorXd& x) {
        const double tau = std::exp(x[0]);
        Eigen::VectorXd r(t.size());
        for (std::size_t j = 0; j < t.size(); ++j) {
            const double val = x[1] + (x[2] - x[1]) * std::exp(-t[j] / tau);
            r[static_cast<Eigen::Index>(j)] = val - nbar[j];
        }
        return r;
    };

    const FitSolution sol = levenberg_fit(model, x0);
    f.tau = std::exp(sol.params[0]);
    f.nbar_ss = sol.params[1];
    f.nbar0 = sol.params[2];
    f.rate = (f.nbar0 - f.nbar_ss) / f.tau;
    f.residual = sol.rms_residual;
    f.degenerate = false;
    return f;
}

} // namespace eitcool
