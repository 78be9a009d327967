// eitcool: batch front-end over the tripod-EIT cooling library.
//
//   eitcool <command> [--config FILE] [--key value ...]
//
// All parameters are flat key-value pairs, either in the --config file
// (one `key = value` per line, '#' comments) or as `--key value` flags;
// flags override the file. Frequencies carry an explicit unit suffix on the
// key: *_gamma (units of the excited-state linewidth Gamma) or *_mhz
// (ordinary MHz, converted with gamma_mhz). Give exactly one suffix per
// quantity. Common keys: out (data file path; stdout if absent),
// format (csv | json), jobs (worker count, 0 = all cores).
//
// Data files are deterministic for a fixed config (no timestamps, %.12g
// formatting); timing lives in the <out>.manifest.json sidecar.

#include <CLI11.hpp>
#include <json.hpp>

#include <eitcool/atom_model.hpp>
#include <eitcool/constants.hpp>
#include <eitcool/cooling_limits.hpp>
#include <eitcool/errors.hpp>
#include <eitcool/ion_chain.hpp>
#include <eitcool/spectroscopy.hpp>
#include <eitcool/steady_state.hpp>
#include <eitcool/version.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using eitcool::ConfigError;
using eitcool::IoError;
using eitcool::TripodParams;
using ordered_json = nlohmann::ordered_json;

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// key-value store (config file + flag overrides)

struct KeyValues {
    std::map<std::string, std::string> vals;
    mutable std::set<std::string> seen; // keys consulted during resolution

    void set(const std::string& k, const std::string& v) { vals[k] = v; }

    bool has(const std::string& k) const {
        auto it = vals.find(k);
        if (it == vals.end()) return false;
        seen.insert(k);
        return true;
    }

    const std::string& raw(const std::string& k) const {
        return vals.at(k);
    }

    void reject_unknown() const {
        for (const auto& [k, v] : vals)
            if (!seen.count(k)) throw ConfigError("unknown key: " + k);
    }
};

double parse_num(const std::string& key, const std::string& text) {
    const char* s = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s || *end != '\0')
        throw ConfigError("value of '" + key + "' is not a number: '" + text +
                          "'");
    return v;
}

double num_or(const KeyValues& kv, const std::string& key, double def) {
    return kv.has(key) ? parse_num(key, kv.raw(key)) : def;
}

long int_or(const KeyValues& kv, const std::string& key, long def) {
    if (!kv.has(key)) return def;
    const std::string& text = kv.raw(key);
    const char* s = text.c_str();
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0')
        throw ConfigError("value of '" + key + "' is not an integer: '" +
                          text + "'");
    return v;
}

bool bool_or(const KeyValues& kv, const std::string& key, bool def) {
    if (!kv.has(key)) return def;
    std::string v = kv.raw(key);
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("value of '" + key + "' is not a boolean: '" +
                      kv.raw(key) + "'");
}

std::string str_or(const KeyValues& kv, const std::string& key,
                   const std::string& def) {
    return kv.has(key) ? kv.raw(key) : def;
}

// One frequency with a mandatory unit suffix. Returns units of Gamma.
double freq_gamma_units(const KeyValues& kv, const std::string& base,
                        double def, double gamma_si) {
    const std::string kg = base + "_gamma", km = base + "_mhz";
    const bool hg = kv.has(kg), hm = kv.has(km);
    if (hg && hm)
        throw ConfigError("give either " + kg + " or " + km + ", not both");
    if (hg) return parse_num(kg, kv.raw(kg));
    if (hm)
        return parse_num(km, kv.raw(km)) * eitcool::constants::two_pi * 1e6 /
               gamma_si;
    return def;
}

// Same, but returned in SI rad/s (trap frequencies, delta_B).
double freq_si_units(const KeyValues& kv, const std::string& base, double def,
                     double gamma_si) {
    const std::string kg = base + "_gamma", km = base + "_mhz";
    const bool hg = kv.has(kg), hm = kv.has(km);
    if (hg && hm)
        throw ConfigError("give either " + kg + " or " + km + ", not both");
    if (hg) return parse_num(kg, kv.raw(kg)) * gamma_si;
    if (hm) return parse_num(km, kv.raw(km)) * eitcool::constants::two_pi * 1e6;
    return def;
}

double resolve_gamma_si(const KeyValues& kv) {
    const double mhz = num_or(kv, "gamma_mhz", 19.6);
    if (!(mhz > 0.0)) throw ConfigError("gamma_mhz must be > 0");
    return eitcool::constants::two_pi * 1e6 * mhz;
}

TripodParams resolve_tripod(const KeyValues& kv, ordered_json& rp) {
    TripodParams p;
    p.gamma = resolve_gamma_si(kv);
    p.omega_1 = freq_gamma_units(kv, "omega_1", p.omega_1, p.gamma);
    p.omega_0 = freq_gamma_units(kv, "omega_0", p.omega_0, p.gamma);
    p.omega_m1 = freq_gamma_units(kv, "omega_m1", p.omega_m1, p.gamma);
    p.delta_1 = freq_gamma_units(kv, "delta_1", p.delta_1, p.gamma);
    p.delta_0 = freq_gamma_units(kv, "delta_0", p.delta_0, p.gamma);
    p.delta_m1 = freq_gamma_units(kv, "delta_m1", p.delta_m1, p.gamma);
    p.delta_b = freq_si_units(kv, "delta_b", p.delta_b, p.gamma);
    p.validate();
    rp["omega_1_over_gamma"] = p.omega_1;
    rp["omega_0_over_gamma"] = p.omega_0;
    rp["omega_m1_over_gamma"] = p.omega_m1;
    rp["delta_1_over_gamma"] = p.delta_1;
    rp["delta_0_over_gamma"] = p.delta_0;
    rp["delta_m1_over_gamma"] = p.delta_m1;
    rp["gamma_mhz"] = p.gamma / (eitcool::constants::two_pi * 1e6);
    rp["delta_b_mhz"] = p.delta_b / (eitcool::constants::two_pi * 1e6);
    return p;
}

eitcool::TrapConfig resolve_trap(const KeyValues& kv, ordered_json& rp) {
    const double gamma_si = resolve_gamma_si(kv);
    eitcool::TrapConfig c;
    c.n_ions = static_cast<int>(int_or(kv, "n_ions", 1));
    c.omega_ax = freq_si_units(kv, "omega_ax",
                               eitcool::constants::two_pi * 0.39e6, gamma_si);
    c.omega_alpha = freq_si_units(
        kv, "omega_alpha", eitcool::constants::two_pi * 4.45e6, gamma_si);
    c.omega_beta = freq_si_units(kv, "omega_beta",
                                 eitcool::constants::two_pi * 4.30e6, gamma_si);
    c.beam_angle_theta =
        num_or(kv, "theta_deg", 40.0) * eitcool::constants::pi / 180.0;
    c.ion_mass = num_or(kv, "ion_mass_amu",
                        c.ion_mass / eitcool::constants::atomic_mass_unit) *
                 eitcool::constants::atomic_mass_unit;
    c.wavelength_eit =
        num_or(kv, "wavelength_eit_nm", c.wavelength_eit * 1e9) * 1e-9;
    c.wavelength_raman =
        num_or(kv, "wavelength_raman_nm", c.wavelength_raman * 1e9) * 1e-9;
    c.validate();
    const double mhz = eitcool::constants::two_pi * 1e6;
    rp["n_ions"] = c.n_ions;
    rp["omega_ax_mhz"] = c.omega_ax / mhz;
    rp["omega_alpha_mhz"] = c.omega_alpha / mhz;
    rp["omega_beta_mhz"] = c.omega_beta / mhz;
    rp["theta_deg"] = c.beam_angle_theta * 180.0 / eitcool::constants::pi;
    rp["ion_mass_amu"] = c.ion_mass / eitcool::constants::atomic_mass_unit;
    rp["wavelength_eit_nm"] = c.wavelength_eit * 1e9;
    rp["wavelength_raman_nm"] = c.wavelength_raman * 1e9;
    return c;
}

// Grid axis: <base>_min_*, <base>_max_*, <base>_count.
struct GridSpec {
    std::string axis; // header-style name recorded in the manifest
    double start = 0.0;
    double stop = 0.0;
    long count = 0;
};

GridSpec resolve_grid(const KeyValues& kv, const std::string& base,
                      const std::string& axis_name, double def_min,
                      double def_max, long def_count, double gamma_si) {
    GridSpec g;
    g.axis = axis_name;
    g.start = freq_gamma_units(kv, base + "_min", def_min, gamma_si);
    g.stop = freq_gamma_units(kv, base + "_max", def_max, gamma_si);
    g.count = int_or(kv, base + "_count", def_count);
    if (g.count < 1)
        throw ConfigError(base + "_count must be >= 1, got " +
                          std::to_string(g.count));
    if (g.count > 1 && !(g.stop > g.start))
        throw ConfigError(base + "_max must exceed " + base + "_min");
    return g;
}

ordered_json grid_json(const GridSpec& g) {
    return ordered_json{{"axis", g.axis},
                        {"start", g.start},
                        {"stop", g.stop},
                        {"count", g.count}};
}

// ---------------------------------------------------------------------------
// tabular output

std::string csv_field(const ordered_json& cell) {
    std::string s;
    if (cell.is_string())
        s = cell.get<std::string>();
    else if (cell.is_boolean())
        s = cell.get<bool>() ? "true" : "false";
    else if (cell.is_number_integer())
        s = std::to_string(cell.get<long long>());
    else if (cell.is_null())
        s = "nan";
    else
        s = fmt_g(cell.get<double>());
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        quoted += c;
        if (c == '"') quoted += '"';
    }
    quoted += '"';
    return quoted;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<ordered_json>> rows;

    void add(std::vector<ordered_json> row) {
        if (row.size() != columns.size())
            throw std::logic_error("row width mismatch");
        rows.push_back(std::move(row));
    }

    std::string to_csv() const {
        std::string out;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out += ',';
            out += columns[c];
        }
        out += '\n';
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) out += ',';
                out += csv_field(row[c]);
            }
            out += '\n';
        }
        return out;
    }

    std::string to_json(const std::string& command) const {
        ordered_json doc;
        doc["version"] = EITCOOL_VERSION_STRING;
        doc["command"] = command;
        doc["columns"] = columns;
        auto& jrows = doc["rows"] = ordered_json::array();
        for (const auto& row : rows) {
            ordered_json jr = ordered_json::array();
            for (const auto& cell : row) jr.push_back(cell);
            jrows.push_back(std::move(jr));
        }
        return doc.dump(2) + "\n";
    }
};

// ---------------------------------------------------------------------------
// result of one command: data + manifest ingredients

struct CmdResult {
    Table table;
    ordered_json resolved = ordered_json::object();
    ordered_json grids = ordered_json::array();
    std::size_t point_failures = 0;
    std::string first_failure;
};

void note_failure(CmdResult& r, std::mutex& mx, const std::string& msg) {
    std::lock_guard<std::mutex> lock(mx);
    if (r.point_failures++ == 0) r.first_failure = msg;
}

void parallel_for(std::size_t n, unsigned jobs,
                  const std::function<void(std::size_t)>& body) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(
        std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n;
                 i = next.fetch_add(1))
                body(i);
        });
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// measured-data files: numeric columns, ',' or whitespace separated,
// '#' comments, optional header line

std::vector<std::vector<double>> read_numeric_table(const std::string& path,
                                                    std::size_t min_cols) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open data file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    bool first_content = true;
    while (std::getline(f, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        for (char& c : line)
            if (c == ',' || c == '\t' || c == '\r') c = ' ';
        std::istringstream ss(line);
        std::vector<double> row;
        std::string tok;
        bool bad = false;
        while (ss >> tok) {
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0') {
                bad = true;
                break;
            }
            row.push_back(v);
        }
        if (bad) {
            if (first_content) { // header row
                first_content = false;
                continue;
            }
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": non-numeric data");
        }
        if (row.empty()) continue;
        first_content = false;
        if (row.size() < min_cols)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected at least " +
                              std::to_string(min_cols) + " columns");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError(path + ": no data rows");
    return rows;
}

// ---------------------------------------------------------------------------
// commands

CmdResult cmd_spectrum(const KeyValues& kv, unsigned jobs) {
    CmdResult r;
    const TripodParams p = resolve_tripod(kv, r.resolved);
    const GridSpec g =
        resolve_grid(kv, "delta0", "delta0_over_gamma", p.delta_1 - 1.0,
                     p.delta_1 + 1.0, 401, p.gamma);
    r.grids.push_back(grid_json(g));
    kv.reject_unknown();

    const auto grid = eitcool::linspace(g.start, g.stop, g.count);
    std::vector<double> rho(grid.size(), nan_v);
    std::mutex mx;
    parallel_for(grid.size(), jobs, [&](std::size_t i) {
        TripodParams q = p;
        q.delta_0 = grid[i];
        try {
            const auto ss = eitcool::solve_steady_state(
                eitcool::build_liouvillian(q));
            rho[i] = std::clamp(ss(eitcool::idx_e, eitcool::idx_e).real(),
                                0.0, 1.0);
        } catch (const std::exception& e) {
            note_failure(r, mx, e.what());
        }
    });

    r.table.columns = {"delta0_over_gamma", "rho_ee"};
    for (std::size_t i = 0; i < grid.size(); ++i)
        r.table.add({grid[i], rho[i]});
    return r;
}

CmdResult cmd_cooling_limit(const KeyValues& kv, unsigned jobs) {
    CmdResult r;
    const TripodParams p = resolve_tripod(kv, r.resolved);
    const GridSpec g = resolve_grid(kv, "omega", "omega_over_gamma", 0.02, 0.6,
                                    200, p.gamma);
    r.grids.push_back(grid_json(g));
    kv.reject_unknown();

    const auto grid = eitcool::linspace(g.start, g.stop, g.count);
    std::vector<eitcool::CoolingResult> res(grid.size());
    std::vector<bool> ok(grid.size(), false);
    std::mutex mx;
    parallel_for(grid.size(), jobs, [&](std::size_t i) {
        try {
            res[i] = eitcool::phonon_limit(p, grid[i]);
            ok[i] = true;
        } catch (const std::exception& e) {
            note_failure(r, mx, e.what());
        }
    });

    r.table.columns = {"omega_over_gamma", "nbar",         "rho_ee_carrier",
                       "rho_ee_red",       "rho_ee_blue",  "not_cooling"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (ok[i])
            r.table.add({grid[i], res[i].nbar_ss, res[i].rho_ee_carrier,
                         res[i].rho_ee_red, res[i].rho_ee_blue,
                         res[i].not_cooling ? 1 : 0});
        else
            r.table.add({grid[i], nan_v, nan_v, nan_v, nan_v, 1});
    }
    return r;
}

CmdResult cmd_dynamics(const KeyValues& kv, unsigned) {
    CmdResult r;
    if (kv.has("data")) { // reduce a measured cooling curve instead
        const std::string path = kv.raw("data");
        kv.reject_unknown();
        const auto rows = read_numeric_table(path, 2);
        std::vector<double> t, nb;
        for (const auto& row : rows) {
            t.push_back(row[0]);
            nb.push_back(row[1]);
        }
        const auto fit = eitcool::fit_cooling_curve(t, nb);
        r.resolved["data"] = path;
        r.resolved["samples"] = t.size();
        r.table.columns = {"tau_us", "nbar_ss", "nbar0", "rate_per_s",
                           "rms_residual"};
        r.table.add({fit.tau, fit.nbar_ss, fit.nbar0, fit.rate * 1e6,
                     fit.residual});
        return r;
    }

    const TripodParams p = resolve_tripod(kv, r.resolved);
    const double eta = num_or(kv, "eta", 0.044);
    const double omega = freq_gamma_units(
        kv, "omega", eitcool::constants::two_pi * 4.45e6 / p.gamma, p.gamma);
    const double nbar0 = num_or(kv, "nbar0", 5.0);
    const double t_max_us = num_or(kv, "t_max_us", 300.0);
    const long t_count = int_or(kv, "t_count", 201);
    if (t_count < 1)
        throw ConfigError("t_count must be >= 1, got " +
                          std::to_string(t_count));
    if (!(t_max_us > 0.0)) throw ConfigError("t_max_us must be > 0");
    kv.reject_unknown();

    const auto t_us = eitcool::linspace(0.0, t_max_us, t_count);
    std::vector<double> t_s(t_us.size());
    for (std::size_t i = 0; i < t_us.size(); ++i) t_s[i] = t_us[i] * 1e-6;
    const auto dyn = eitcool::cooling_dynamics(p, eta, omega, nbar0, t_s);

    r.resolved["eta"] = eta;
    r.resolved["omega_over_gamma"] = omega;
    r.resolved["nbar0"] = nbar0;
    r.resolved["derived_rate_per_s"] = dyn.rate;
    r.resolved["derived_tau_us"] = 1e6 / dyn.rate;
    r.resolved["derived_nbar_ss"] = dyn.limit.nbar_ss;
    r.grids.push_back(grid_json(
        GridSpec{"t_us", 0.0, t_max_us, t_count}));
    r.table.columns = {"t_us", "nbar"};
    for (std::size_t i = 0; i < t_us.size(); ++i)
        r.table.add({t_us[i], dyn.nbar[i]});
    return r;
}

CmdResult cmd_scan(const KeyValues& kv, unsigned jobs) {
    CmdResult r;
    const TripodParams p = resolve_tripod(kv, r.resolved);
    const GridSpec go = resolve_grid(kv, "omega", "omega_over_gamma", 0.05,
                                     0.35, 30, p.gamma);
    const GridSpec gr = resolve_grid(kv, "omega1", "omega_1_over_gamma", 2.5,
                                     3.2, 30, p.gamma);
    eitcool::ScanOptions opt;
    opt.optimize_probe = bool_or(kv, "optimize_probe", true);
    opt.com_freq = freq_gamma_units(kv, "com_freq", 0.0, p.gamma);
    opt.window_lo = freq_gamma_units(kv, "window_lo", 0.0, p.gamma);
    opt.window_hi = freq_gamma_units(kv, "window_hi", 0.0, p.gamma);
    opt.presample = static_cast<int>(int_or(kv, "presample", 64));
    opt.jobs = jobs;
    kv.reject_unknown();

    r.resolved["optimize_probe"] = opt.optimize_probe;
    r.resolved["com_freq_over_gamma"] =
        opt.com_freq > 0.0 ? opt.com_freq
                           : eitcool::constants::two_pi * 4.45e6 / p.gamma;
    r.resolved["presample"] = opt.presample;
    r.grids.push_back(grid_json(gr));
    r.grids.push_back(grid_json(go));

    const auto omega_axis = eitcool::linspace(go.start, go.stop, go.count);
    const auto rabi_axis = eitcool::linspace(gr.start, gr.stop, gr.count);
    const auto grid = eitcool::scan_cooling(p, omega_axis, rabi_axis, opt);
    r.point_failures = static_cast<std::size_t>(grid.failures);
    if (grid.failures) r.first_failure = "see per-cell NaN entries";

    r.table.columns = {"omega_1_over_gamma", "omega_over_gamma", "nbar",
                       "not_cooling", "delta0_star_over_gamma"};
    for (std::size_t j = 0; j < rabi_axis.size(); ++j) {
        double d0 = grid.optimal_delta0[j];
        if (std::isnan(d0) && !opt.optimize_probe) d0 = p.delta_0;
        for (std::size_t i = 0; i < omega_axis.size(); ++i) {
            const double v = grid.values(static_cast<Eigen::Index>(i),
                                         static_cast<Eigen::Index>(j));
            r.table.add({rabi_axis[j], omega_axis[i], v,
                         std::isnan(v) ? 1 : 0, d0});
        }
    }
    return r;
}

CmdResult cmd_optimize(const KeyValues& kv, unsigned) {
    CmdResult r;
    const TripodParams p = resolve_tripod(kv, r.resolved);
    const double omega = freq_gamma_units(
        kv, "omega", eitcool::constants::two_pi * 4.45e6 / p.gamma, p.gamma);
    const double wlo =
        freq_gamma_units(kv, "window_lo", p.delta_1 - 0.2, p.gamma);
    const double whi =
        freq_gamma_units(kv, "window_hi", p.delta_1 + 0.8, p.gamma);
    const int presample = static_cast<int>(int_or(kv, "presample", 64));
    const double tol = num_or(kv, "tol", 1e-4);
    kv.reject_unknown();

    const auto po =
        eitcool::optimize_probe_detuning(p, omega, wlo, whi, presample, tol);
    r.resolved["omega_over_gamma"] = omega;
    r.resolved["window_lo_over_gamma"] = wlo;
    r.resolved["window_hi_over_gamma"] = whi;
    r.resolved["presample"] = presample;
    r.resolved["tol"] = tol;
    r.table.columns = {"delta0_star_over_gamma", "nbar_star"};
    r.table.add({po.delta0, po.nbar});
    return r;
}

CmdResult cmd_chain_modes(const KeyValues& kv, unsigned) {
    CmdResult r;
    const eitcool::TrapConfig cfg = resolve_trap(kv, r.resolved);
    const std::string beam_name = str_or(kv, "beam", "eit");
    eitcool::Beam beam;
    if (beam_name == "eit")
        beam = eitcool::Beam::eit;
    else if (beam_name == "raman")
        beam = eitcool::Beam::raman;
    else
        throw ConfigError("beam must be 'eit' or 'raman', got '" + beam_name +
                          "'");
    const long ion = int_or(kv, "ion", (cfg.n_ions - 1) / 2);
    if (ion < 0 || ion >= cfg.n_ions)
        throw ConfigError("ion index out of range: " + std::to_string(ion));
    kv.reject_unknown();

    const auto spectrum = eitcool::lamb_dicke_factors(
        eitcool::transverse_modes(cfg), cfg, beam);
    r.resolved["beam"] = beam_name;
    r.resolved["ion"] = ion;
    r.resolved["derived_zigzag_margin"] = eitcool::zigzag_margin(cfg);

    const double mhz = eitcool::constants::two_pi * 1e6;
    r.table.columns = {"branch", "mode_index", "freq_MHz", "eta"};
    for (int m = 0; m < cfg.n_ions; ++m)
        r.table.add({"alpha", m, spectrum.freq_alpha[m] / mhz,
                     spectrum.eta_alpha(ion, m)});
    for (int m = 0; m < cfg.n_ions; ++m)
        r.table.add({"beta", m, spectrum.freq_beta[m] / mhz,
                     spectrum.eta_beta(ion, m)});
    return r;
}

CmdResult cmd_thermometry(const KeyValues& kv, unsigned) {
    CmdResult r;
    const bool mode_ratio = kv.has("ratio");
    const bool mode_pair = kv.has("p_lower") || kv.has("p_upper");
    const bool mode_data = kv.has("data");
    if (mode_ratio + mode_pair + mode_data != 1)
        throw ConfigError(
            "thermometry needs exactly one of: ratio | p_lower + p_upper | "
            "data");

    if (mode_ratio) {
        const double ratio = parse_num("ratio", kv.raw("ratio"));
        kv.reject_unknown();
        r.resolved["ratio"] = ratio;
        r.table.columns = {"ratio", "nbar"};
        r.table.add({ratio, eitcool::ratio_to_nbar(ratio)});
        return r;
    }
    if (mode_pair) {
        if (!kv.has("p_lower") || !kv.has("p_upper"))
            throw ConfigError("sideband pair needs both p_lower and p_upper");
        const double pl = parse_num("p_lower", kv.raw("p_lower"));
        const double pu = parse_num("p_upper", kv.raw("p_upper"));
        const double sigma = num_or(kv, "sigma_p", 0.0);
        kv.reject_unknown();
        const auto sp = eitcool::sideband_pair(0.0, pl, pu, sigma);
        r.resolved["p_lower"] = pl;
        r.resolved["p_upper"] = pu;
        r.resolved["sigma_p"] = sigma;
        r.table.columns = {"p_lower", "p_upper", "ratio", "nbar", "nbar_err"};
        r.table.add({pl, pu, pl / pu, sp.nbar, sp.nbar_err});
        return r;
    }

    const std::string path = kv.raw("data");
    const double sigma_common = num_or(kv, "sigma_p", 0.0);
    kv.reject_unknown();
    const auto rows = read_numeric_table(path, 3);
    r.resolved["data"] = path;
    r.resolved["sigma_p"] = sigma_common;
    r.resolved["samples"] = rows.size();
    r.table.columns = {"mode_freq_MHz", "p_lower", "p_upper", "nbar",
                       "nbar_err"};
    for (const auto& row : rows) {
        const double sigma = row.size() > 3 ? row[3] : sigma_common;
        const auto sp = eitcool::sideband_pair(
            row[0] * eitcool::constants::two_pi * 1e6, row[1], row[2], sigma);
        r.table.add({row[0], row[1], row[2], sp.nbar, sp.nbar_err});
    }
    return r;
}

CmdResult cmd_rabi_fit(const KeyValues& kv, unsigned) {
    CmdResult r;
    if (!kv.has("data"))
        throw ConfigError("rabi-fit needs a data file: --data FILE "
                          "(columns t_us, p)");
    const std::string path = kv.raw("data");
    kv.reject_unknown();
    const auto rows = read_numeric_table(path, 2);
    std::vector<double> t, pr;
    for (const auto& row : rows) {
        t.push_back(row[0]);
        pr.push_back(row[1]);
    }
    const auto fit = eitcool::fit_rabi(t, pr);
    r.resolved["data"] = path;
    r.resolved["samples"] = t.size();
    r.table.columns = {"contrast_a", "omega_bar_MHz", "p0", "rms_residual"};
    // t is in us, so the fitted angular frequency is rad/us; /2pi gives MHz.
    r.table.add({fit.a, fit.b / eitcool::constants::two_pi, fit.p0,
                 fit.residual});
    return r;
}

// ---------------------------------------------------------------------------

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open output file: " + path);
    f << content;
    f.flush();
    if (!f) throw IoError("write failed: " + path);
}

int run_command(const std::string& name, const KeyValues& kv) {
    const std::string out = str_or(kv, "out", "");
    const std::string format = str_or(kv, "format", "csv");
    if (format != "csv" && format != "json")
        throw ConfigError("format must be 'csv' or 'json', got '" + format +
                          "'");
    const unsigned jobs = static_cast<unsigned>(int_or(kv, "jobs", 0));

    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    CmdResult res;
    if (name == "spectrum")
        res = cmd_spectrum(kv, jobs);
    else if (name == "cooling-limit")
        res = cmd_cooling_limit(kv, jobs);
    else if (name == "dynamics")
        res = cmd_dynamics(kv, jobs);
    else if (name == "scan")
        res = cmd_scan(kv, jobs);
    else if (name == "optimize")
        res = cmd_optimize(kv, jobs);
    else if (name == "chain-modes")
        res = cmd_chain_modes(kv, jobs);
    else if (name == "thermometry")
        res = cmd_thermometry(kv, jobs);
    else if (name == "rabi-fit")
        res = cmd_rabi_fit(kv, jobs);
    else
        throw ConfigError("unknown command: " + name);
    const double wall =
        std::chrono::duration<double>(clock::now() - t0).count();

    if (res.point_failures)
        std::cerr << "warning: " << res.point_failures
                  << " grid point(s) failed (" << res.first_failure << ")\n";

    const std::string payload = format == "csv"
                                    ? res.table.to_csv()
                                    : res.table.to_json(name);
    if (out.empty()) {
        std::cout << payload;
        return 0;
    }
    write_file(out, payload);

    ordered_json manifest;
    manifest["command"] = name;
    res.resolved["format"] = format;
    res.resolved["out"] = out;
    manifest["resolved_params"] = res.resolved;
    manifest["grid_specs"] = res.grids;
    manifest["version"] = EITCOOL_VERSION_STRING;
    manifest["wall_time_s"] = wall;
    write_file(out + ".manifest.json", manifest.dump(2) + "\n");
    return 0;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string()
                                      : s.substr(b, e - b + 1);
    };
    while (std::getline(f, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty()) continue;
        std::string key, value;
        if (auto eq = t.find('='); eq != std::string::npos) {
            key = trim(t.substr(0, eq));
            value = trim(t.substr(eq + 1));
        } else if (auto sp = t.find_first_of(" \t"); sp != std::string::npos) {
            key = trim(t.substr(0, sp));
            value = trim(t.substr(sp + 1));
        }
        if (key.empty() || value.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        kv[key] = value;
    }
    return kv;
}

void overlay_flags(KeyValues& kv, const std::vector<std::string>& tokens) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& tok = tokens[i];
        if (tok.rfind("--", 0) != 0)
            throw ConfigError("unexpected argument: " + tok);
        std::string body = tok.substr(2);
        std::string value;
        if (auto eq = body.find('='); eq != std::string::npos) {
            value = body.substr(eq + 1);
            body.erase(eq);
        } else {
            if (i + 1 >= tokens.size())
                throw ConfigError("missing value for --" + body);
            value = tokens[++i];
        }
        if (body.empty()) throw ConfigError("empty flag name");
        std::replace(body.begin(), body.end(), '-', '_');
        kv.set(body, value);
    }
}

constexpr const char* kKeyHelp = R"(Keys (via --key value or the config file):
  common        out, format (csv|json), jobs
  atom          omega_1, omega_0, omega_m1, delta_1, delta_0, delta_m1
                (suffix _gamma or _mhz), gamma_mhz, delta_b_{gamma|mhz}
  trap          n_ions, omega_ax, omega_alpha, omega_beta (_gamma|_mhz),
                theta_deg, ion_mass_amu, wavelength_eit_nm, wavelength_raman_nm
  grids         <axis>_min_*, <axis>_max_*, <axis>_count
)";

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"eitcool: steady states, cooling limits and sideband "
                 "thermometry of a tripod EIT system"};
    app.require_subcommand(1);
    app.footer(kKeyHelp);

    struct Sub {
        CLI::App* cmd;
        std::string config;
    };
    std::map<std::string, Sub> subs;
    const std::vector<std::pair<std::string, std::string>> defs = {
        {"spectrum", "Steady-state absorption rho_ee over a probe-detuning "
                     "grid (delta0_min/_max/_count)"},
        {"cooling-limit", "Phonon limit and sideband weights over a "
                          "mode-frequency grid (omega_min/_max/_count)"},
        {"dynamics", "Rate-equation cooling curve nbar(t) (eta, omega, nbar0, "
                     "t_max_us, t_count), or fit a measured one (--data: "
                     "t_us, nbar)"},
        {"scan", "Phonon-limit heatmap over pump Rabi frequency "
                 "(omega1_min/_max/_count) x mode frequency "
                 "(omega_min/_max/_count), optionally optimizing the probe "
                 "detuning per column (optimize_probe, com_freq, window_lo/"
                 "hi, presample)"},
        {"optimize", "Probe detuning minimizing the phonon limit of one mode "
                     "(omega, window_lo/hi, presample, tol)"},
        {"chain-modes", "Transverse normal modes and Lamb-Dicke factors of a "
                        "linear ion chain (trap keys, beam, ion)"},
        {"thermometry", "Sideband-ratio phonon numbers: --ratio R, or "
                        "--p-lower/--p-upper [--sigma-p], or --data FILE "
                        "(mode_freq_mhz, p_lower, p_upper[, sigma_p])"},
        {"rabi-fit", "Fit a carrier Rabi flop (--data FILE: t_us, p) for "
                     "contrast decay and mean Rabi frequency"},
    };
    for (const auto& [name, desc] : defs) {
        CLI::App* c = app.add_subcommand(name, desc);
        c->allow_extras();
        auto& slot = subs[name];
        slot.cmd = c;
        c->add_option("--config", slot.config,
                      "Flat key = value parameter file");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        for (const auto& [name, sub] : subs) {
            if (!sub.cmd->parsed()) continue;
            KeyValues kv;
            if (!sub.config.empty())
                for (auto& [k, v] : parse_config_file(sub.config))
                    kv.set(k, v);
            overlay_flags(kv, sub.cmd->remaining());
            return run_command(name, kv);
        }
        std::cerr << "error: no command\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const eitcool::Error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
