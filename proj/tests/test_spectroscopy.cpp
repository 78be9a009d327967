#include <doctest.h>

#include <cmath>
#include <vector>

#include <eitcool/ion_chain.hpp>
#include <eitcool/spectroscopy.hpp>

using namespace eitcool;

namespace {

TrapConfig thermometry_trap(int n, double fax_mhz) {
    TrapConfig c;
    c.n_ions = n;
    c.omega_ax = constants::two_pi * fax_mhz * 1e6;
    c.omega_alpha = constants::two_pi * 4.45e6;
    c.omega_beta = constants::two_pi * 4.30e6;
    return c;
}

// Lamb-Dicke factors of one ion against every mode, alpha branch then beta,
// the order the multi-mode routines expect.
std::vector<double> ion_etas(const ModeSpectrum& s, int ion) {
    const int n = static_cast<int>(s.freq_alpha.size());
    std::vector<double> e(2 * n);
    for (int m = 0; m < n; ++m) {
        e[m] = s.eta_alpha(ion, m);
        e[n + m] = s.eta_beta(ion, m);
    }
    return e;
}

} // namespace

TEST_CASE("thermal ratio: closed form and round trip") {
    CHECK(ratio_to_nbar(0.0) == 0.0);
    CHECK(ratio_to_nbar(0.5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(nbar_to_ratio(0.0) == 0.0);
    CHECK(nbar_to_ratio(1.0) == doctest::Approx(0.5).epsilon(1e-14));
    for (double r = 0.0; r < 0.995; r += 0.03)
        CHECK(nbar_to_ratio(ratio_to_nbar(r)) ==
              doctest::Approx(r).epsilon(1e-12));
    CHECK_THROWS_AS(ratio_to_nbar(1.0), RatioOutOfRange);
    CHECK_THROWS_AS(ratio_to_nbar(1.5), RatioOutOfRange);
    CHECK_THROWS_AS(ratio_to_nbar(-0.1), RatioOutOfRange);
}

TEST_CASE("sideband pair: ratio thermometry with error propagation") {
    const SidebandPair s = sideband_pair(1.0, 0.2, 0.5, 0.01);
    CHECK(s.nbar == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    const double r = 0.4;
    const double sigma_r = 0.01 / 0.5 * std::sqrt(1.0 + r * r);
    CHECK(s.nbar_err ==
          doctest::Approx(sigma_r / ((1.0 - r) * (1.0 - r))).epsilon(1e-12));
    CHECK(sideband_pair(1.0, 0.2, 0.5).nbar_err == 0.0);
    CHECK_THROWS_AS(sideband_pair(1.0, 0.2, 0.0), RatioOutOfRange);
    CHECK_THROWS_AS(sideband_pair(1.0, -0.1, 0.5), ConfigError);
    CHECK_THROWS_AS(sideband_pair(1.0, 0.2, 1.5), ConfigError);
}

TEST_CASE("spectrum model: ground state has no lower sidebands") {
    const TrapConfig c = thermometry_trap(3, 0.39);
    const ModeSpectrum s =
        lamb_dicke_factors(transverse_modes(c), c, Beam::raman);
    std::vector<double> grid(501);
    for (int i = 0; i <= 500; ++i)
        grid[i] = constants::two_pi * (4.1e6 + 0.4e6 * i / 500.0);
    const SidebandSpectrum sp = sideband_spectrum_model(
        s, 0, std::vector<double>(6, 0.0), constants::two_pi * 50e3, 10e-6,
        constants::two_pi * 2e3, grid);
    for (size_t i = 0; i < grid.size(); ++i) {
        CHECK(sp.lower[i] == 0.0);
        CHECK(sp.upper[i] >= 0.0);
    }
}

TEST_CASE("spectrum model: one thermal phonon gives the 1/2 peak ratio") {
    const TrapConfig c = thermometry_trap(1, 0.39);
    const ModeSpectrum s =
        lamb_dicke_factors(transverse_modes(c), c, Beam::raman);
    const SidebandSpectrum sp = sideband_spectrum_model(
        s, 0, {1.0, 0.0}, constants::two_pi * 50e3, 10e-6,
        constants::two_pi * 2e3, {c.omega_alpha});
    CHECK(sp.lower[0] / sp.upper[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sp.upper[0] > 0.0);
    CHECK(sp.upper[0] < 0.05); // weak probe: far from saturating the clip
}

TEST_CASE("spectrum model: edge ion resolves all ten modes, the center ion "
          "only the symmetric six") {
    // In a 5-ion chain the odd (antisymmetric) modes have a node at the
    // center ion, so its spectrum drops them.
    const TrapConfig c = thermometry_trap(5, 0.39);
    const ModeSpectrum s =
        lamb_dicke_factors(transverse_modes(c), c, Beam::raman);
    std::vector<double> grid(8001);
    for (int i = 0; i <= 8000; ++i)
        grid[i] = constants::two_pi * (4.1e6 + 0.4e6 * i / 8000.0);
    const std::vector<double> nbars(10, 3.0);
    const auto count_peaks = [&](int ion) {
        const SidebandSpectrum sp = sideband_spectrum_model(
            s, ion, nbars, constants::two_pi * 50e3, 10e-6,
            constants::two_pi * 2e3, grid);
        int peaks = 0;
        for (size_t i = 1; i + 1 < sp.upper.size(); ++i)
            if (sp.upper[i] > sp.upper[i - 1] &&
                sp.upper[i] > sp.upper[i + 1] && sp.upper[i] > 1e-6)
                ++peaks;
        return peaks;
    };
    CHECK(count_peaks(0) == 10);
    CHECK(count_peaks(2) == 6);
}

TEST_CASE("spectrum model: input validation") {
    const TrapConfig c = thermometry_trap(2, 0.39);
    const ModeSpectrum bare = transverse_modes(c);
    const ModeSpectrum s = lamb_dicke_factors(bare, c, Beam::raman);
    const std::vector<double> grid = {c.omega_alpha};
    const double om = constants::two_pi * 50e3;
    const double width = constants::two_pi * 2e3;
    // etas not filled yet
    CHECK_THROWS_AS(sideband_spectrum_model(bare, 0, {1, 1, 1, 1}, om, 1e-5,
                                            width, grid),
                    ConfigError);
    CHECK_THROWS_AS(sideband_spectrum_model(s, 5, {1, 1, 1, 1}, om, 1e-5,
                                            width, grid),
                    ConfigError);
    CHECK_THROWS_AS(sideband_spectrum_model(s, 0, {1, 1, 1}, om, 1e-5, width,
                                            grid),
                    ConfigError); // needs 2N nbars
    CHECK_THROWS_AS(sideband_spectrum_model(s, 0, {1, 1, 1, 1}, om, 1e-5, 0.0,
                                            grid),
                    ConfigError);
    CHECK_THROWS_AS(sideband_spectrum_model(s, 0, {1, 1, 1, 1}, om, 1e-5,
                                            width, {}),
                    ConfigError);
    CHECK_THROWS_AS(sideband_spectrum_model(s, 0, {1, -1, 1, 1}, om, 1e-5,
                                            width, grid),
                    ConfigError);
}

TEST_CASE("ac stark: quarter-rule inversion") {
    CHECK(rabi_to_ac_stark(2.0, 4.5) ==
          doctest::Approx(4.0 / 18.0).epsilon(1e-14));
    CHECK(rabi_to_ac_stark(0.76, 4.5) ==
          doctest::Approx(0.76 * 0.76 / 18.0).epsilon(1e-14));
    CHECK(ac_stark_to_rabi(0.0, 4.5) == 0.0);
    for (double om : {0.3, 1.0, 2.0})
        CHECK(ac_stark_to_rabi(rabi_to_ac_stark(om, 4.5), 4.5) ==
              doctest::Approx(om).epsilon(1e-12));
    // red detuning: both shift and detuning flip sign together
    CHECK(ac_stark_to_rabi(rabi_to_ac_stark(2.0, -4.5), -4.5) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(ac_stark_to_rabi(0.1, -4.0), InconsistentSigns);
    CHECK_THROWS_AS(ac_stark_to_rabi(-0.1, 4.0), InconsistentSigns);
    CHECK_THROWS_AS(ac_stark_to_rabi(0.1, 0.0), ConfigError);
    CHECK_THROWS_AS(rabi_to_ac_stark(2.0, 0.0), ConfigError);
}

TEST_CASE("debye-waller: thermal occupation softens the carrier coupling") {
    const double om = constants::two_pi * 1e5;
    CHECK(debye_waller_rabi(om, {}, {}) == om);
    CHECK(debye_waller_rabi(om, {0.0, 0.0}, {2.0, 3.0}) == om);
    // zero-point motion alone: exp(-sum eta^2 / 2)
    CHECK(debye_waller_rabi(om, {0.1, 0.2}, {0.0, 0.0}) ==
          doctest::Approx(om * std::exp(-0.025)).epsilon(1e-14));
    // one mode at eta = 0.1, nbar = 2: factor exp(-0.01 * 2.5)
    CHECK(debye_waller_rabi(om, {0.1}, {2.0}) ==
          doctest::Approx(om * std::exp(-0.025)).epsilon(1e-14));
    // multiplicative across modes
    const double joint = debye_waller_rabi(om, {0.1, 0.15}, {2.0, 1.0});
    const double split = debye_waller_rabi(
        debye_waller_rabi(om, {0.1}, {2.0}), {0.15}, {1.0});
    CHECK(joint == doctest::Approx(split).epsilon(1e-12));
    CHECK_THROWS_AS(debye_waller_rabi(om, {0.1}, {-1.0}), ConfigError);
    CHECK_THROWS_AS(debye_waller_rabi(om, {0.1, 0.2}, {1.0}), ConfigError);
}

TEST_CASE("carrier flop: limits and bounds") {
    const double om = constants::two_pi * 1e5;
    const std::vector<double> etas = {0.06, 0.09, 0.04};
    const std::vector<double> nbars = {3.0, 1.5, 2.5};
    std::vector<double> t(200);
    for (int i = 0; i < 200; ++i) t[i] = 50e-6 * i / 199.0;

    const auto p = carrier_flop(om, etas, nbars, t);
    CHECK(p.front() == 0.0);
    for (double v : p) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    // cold chain: undamped flop at the Debye-Waller frequency
    const auto cold = carrier_flop(om, etas, {0.0, 0.0, 0.0}, t);
    const double om_bar = debye_waller_rabi(om, etas, {0.0, 0.0, 0.0});
    for (int i = 0; i < 200; ++i)
        CHECK(cold[i] == doctest::Approx(
                             0.5 * (1.0 - std::cos(om_bar * t[i])))
                             .epsilon(1e-12));

    // contrast envelope never recovers
    const double ob = debye_waller_rabi(om, etas, nbars);
    double prev = 1.0;
    for (double ti : t) {
        double contrast = 1.0;
        for (size_t m = 0; m < etas.size(); ++m) {
            const double a = etas[m] * etas[m] * nbars[m] * ob * ti;
            contrast /= std::sqrt(1.0 + a * a);
        }
        CHECK(contrast <= prev + 1e-15);
        prev = contrast;
    }
}

TEST_CASE("carrier flop: short-time quadratic contrast matches the exact "
          "product form") {
    const double om = constants::two_pi * 1e5;
    const std::vector<double> etas = {0.06, 0.09, 0.04};
    const std::vector<double> nbars = {3.0, 1.5, 2.5};
    const double om_bar = debye_waller_rabi(om, etas, nbars);
    double quad = 0.0;
    for (size_t m = 0; m < 3; ++m)
        quad += std::pow(etas[m] * etas[m] * nbars[m], 2.0);
    for (int i = 1; i <= 400; ++i) {
        const double ti = 1e-7 * i;
        const double x = om_bar * ti;
        if (0.5 * x * x * quad >= 0.05) break; // leave the short-time window
        const auto pe = carrier_flop(om, etas, nbars, {ti}, false);
        const auto pq = carrier_flop(om, etas, nbars, {ti}, true);
        CHECK(std::abs(pe[0] - pq[0]) < 0.01);
    }
}

TEST_CASE("rabi fit: recovers frequency, damping, and offset from noiseless "
          "flops") {
    const std::vector<double> etas = {0.05, 0.08};
    const std::vector<double> nbars = {2.0, 1.0};
    const double om = constants::two_pi * 1e5;
    const double om_bar = debye_waller_rabi(om, etas, nbars);
    double quad = 0.0;
    for (size_t m = 0; m < 2; ++m)
        quad += std::pow(etas[m] * etas[m] * nbars[m], 2.0);
    std::vector<double> t(120);
    for (int i = 0; i < 120; ++i) t[i] = 40e-6 * (i + 1) / 120.0;

    const RabiFit f = fit_rabi(t, carrier_flop(om, etas, nbars, t, true));
    CHECK(f.b == doctest::Approx(om_bar).epsilon(1e-6));
    CHECK(f.a == doctest::Approx(0.5 * quad).epsilon(1e-4));
    CHECK(std::abs(f.p0) < 1e-9);
    CHECK(f.residual < 1e-12);

    // ground-state data: pure cosine, no damping term
    const RabiFit g =
        fit_rabi(t, carrier_flop(om, etas, {0.0, 0.0}, t, false));
    const double om_cold = debye_waller_rabi(om, etas, {0.0, 0.0});
    CHECK(g.b == doctest::Approx(om_cold).epsilon(1e-9));
    CHECK(std::abs(g.a) < 1e-6);

    CHECK_THROWS_AS(fit_rabi({1e-6, 2e-6, 3e-6}, {0.1, 0.2, 0.3}),
                    InsufficientData);
}

TEST_CASE("rabi fit: broadband-cooled chain flops faster than a chain with "
          "only cold center-of-mass modes") {
    // 36 ions, edge ion, counter-propagating pair. Cooling every mode to
    // nbar = 0.3 leaves a higher Debye-Waller frequency than parking the
    // non-COM modes at nbar = 5 -- and the fit resolves the difference.
    const TrapConfig c = thermometry_trap(36, 0.27);
    const ModeSpectrum s =
        lamb_dicke_factors(transverse_modes(c), c, Beam::raman);
    const std::vector<double> etas = ion_etas(s, 0);
    const std::vector<double> broadband(72, 0.3);
    std::vector<double> com_only(72, 5.0);
    com_only[0] = com_only[36] = 0.3; // the two COM modes head each branch

    const double om = constants::two_pi * 1e5;
    std::vector<double> t(200);
    for (int i = 0; i < 200; ++i) t[i] = 30e-6 * (i + 1) / 200.0;

    const RabiFit f_bb = fit_rabi(t, carrier_flop(om, etas, broadband, t, true));
    const RabiFit f_com = fit_rabi(t, carrier_flop(om, etas, com_only, t, true));
    CHECK(f_bb.b == doctest::Approx(debye_waller_rabi(om, etas, broadband))
                        .epsilon(1e-5));
    CHECK(f_com.b == doctest::Approx(debye_waller_rabi(om, etas, com_only))
                         .epsilon(1e-5));
    CHECK(f_bb.b > f_com.b);
    CHECK(f_bb.b == doctest::Approx(624007.79).epsilon(1e-4));
    CHECK(f_com.b == doctest::Approx(599937.67).epsilon(1e-4));
}

TEST_CASE("cooling curve fit: noiseless exponential round trip") {
    std::vector<double> t(40), nb(40);
    for (int i = 0; i < 40; ++i) {
        t[i] = 200e-6 * i / 39.0;
        nb[i] = 0.08 + (5.0 - 0.08) * std::exp(-t[i] / 48e-6);
    }
    const CoolingCurveFit f = fit_cooling_curve(t, nb);
    CHECK_FALSE(f.degenerate);
    CHECK(f.tau == doctest::Approx(48e-6).epsilon(1e-8));
    CHECK(f.nbar_ss == doctest::Approx(0.08).epsilon(1e-8));
    CHECK(f.nbar0 == doctest::Approx(5.0).epsilon(1e-8));
    CHECK(f.rate == doctest::Approx((f.nbar0 - f.nbar_ss) / f.tau)
                        .epsilon(1e-12));
    CHECK(f.rate == doctest::Approx(102500.0).epsilon(1e-6));
    CHECK(f.residual < 1e-12);
}

TEST_CASE("cooling curve fit: constant data is flagged, not fitted") {
    const std::vector<double> t = {0.0, 1e-5, 2e-5, 3e-5, 4e-5, 5e-5};
    const CoolingCurveFit f = fit_cooling_curve(t, std::vector<double>(6, 0.7));
    CHECK(f.degenerate);
    CHECK(std::isnan(f.tau));
    CHECK(f.nbar_ss == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(f.rate == 0.0);
    CHECK_THROWS_AS(fit_cooling_curve({0.0, 1e-5, 2e-5}, {3.0, 2.0, 1.0}),
                    InsufficientData);
}
