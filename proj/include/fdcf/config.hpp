// SPDX-License-Identifier: Apache-2.0

#ifndef FDCF_CONFIG_HPP
#define FDCF_CONFIG_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fdcf/util.hpp"

namespace fdcf {

/// Scenario constants. Defaults reproduce the reference parameter set:
/// 1 km wrap-around square, 20 MHz band, 200-sample / 1 ms coherence block,
/// 2-bit 10 Mbps fronthaul, -20 dB residual-interference suppression.
struct SystemConfig {
    int M = 32;   // access points
    int Nt = 8;   // transmit antennas per AP
    int Nr = 8;   // receive antennas per AP
    int Kd = 12;  // downlink UEs
    int Ku = 8;   // uplink UEs

    double D_km = 1.0;
    int tau_c = 200;
    int tau_td = 12;  // downlink-UE pilot samples (>= Kd)
    int tau_tu = 8;   // uplink-UE pilot samples (>= Ku)
    double Tc_s = 1e-3;

    double p_t_w = 0.2;
    double p_d_w = 1.0;  // 30 dBm
    double p_u_w = 0.5;  // 27 dBm
    double N0_dbw = -121.4;

    double sigma_sd_db = 2.0;
    double delta = 0.5;

    double gamma_ri = 1e-2;       // linear RI suppression (config key is in dB)
    double pl_ri_db = -81.1846;   // intra-AP RI path loss

    int nu = 2;            // fronthaul quantization bits (0 = perfect fronthaul)
    double C_fh_bps = 1e7;
    int fronthaul_cap_denominator = 4;  // 4 per the cap rule statement, 2 per its proof

    double alpha_ap = 0.39;
    double alpha_ue = 0.3;
    double P0_w = 0.825;
    double Ptc_ap_w = 0.2;
    double P_ft_w = 10.0;
    double Ptc_dl_w = 0.2;
    double Ptc_ul_w = 0.2;

    double B_hz = 20e6;

    std::vector<double> w_d;   // WSEE weights, downlink; empty = 1/K each
    std::vector<double> w_u;   // WSEE weights, uplink
    std::vector<double> S_o_dl;  // QoS floors (bit/s/Hz); empty = 0
    std::vector<double> S_o_ul;

    // Three-slope path-loss constants (d in km).
    double d0_km = 0.01;
    double d1_km = 0.05;
    double L_pl_db = 140.72;

    // "direct": estimates drawn from their exact statistics. "pilot": the
    // pilot projection is simulated. Statistically equivalent.
    std::string estimation_mode = "direct";

    bool pilots_explicit = false;  // true once tau_td/tau_tu were set by hand

    int K() const { return Kd + Ku; }
    int tau_t() const { return tau_td + tau_tu; }
    double tau_f() const { return static_cast<double>(tau_c - tau_t()) / tau_c; }
    double N0_w() const { return db_to_lin(N0_dbw); }
    double rho_d() const { return p_d_w / N0_w(); }
    double rho_u() const { return p_u_w / N0_w(); }
    double rho_t() const { return p_t_w / N0_w(); }

    double weight_dl(int k) const { return w_d.empty() ? 1.0 / K() : w_d[static_cast<std::size_t>(k)]; }
    double weight_ul(int l) const { return w_u.empty() ? 1.0 / K() : w_u[static_cast<std::size_t>(l)]; }
    double qos_dl(int k) const { return S_o_dl.empty() ? 0.0 : S_o_dl[static_cast<std::size_t>(k)]; }
    double qos_ul(int l) const { return S_o_ul.empty() ? 0.0 : S_o_ul[static_cast<std::size_t>(l)]; }

    /// Sets p_d = 2 p_u = p, the uplink/downlink transmit-power convention
    /// used by every power sweep.
    void set_power_dbm(double p_dbm) {
        p_d_w = dbm_to_watt(p_dbm);
        p_u_w = 0.5 * p_d_w;
    }

    void validate() const {
        auto fail = [](const std::string& msg) { throw ConfigError(msg); };
        if (M < 1 || Nt < 1 || Nr < 1 || Kd < 1 || Ku < 0) fail("counts must be positive (Ku may be 0)");
        if (Kd + Ku < 1) fail("no UEs configured");
        if (D_km <= 0) fail("D_km must be > 0");
        if (tau_td < Kd) fail("tau_td must be >= Kd (orthogonal downlink pilots)");
        if (Ku > 0 && tau_tu < Ku) fail("tau_tu must be >= Ku (orthogonal uplink pilots)");
        if (tau_t() >= tau_c) fail("tau_td + tau_tu must be < tau_c");
        if (Tc_s <= 0) fail("Tc_s must be > 0");
        if (p_t_w <= 0 || p_d_w <= 0 || p_u_w <= 0) fail("powers must be > 0");
        if (delta < 0.0 || delta > 1.0) fail("delta out of range [0,1]");
        if (sigma_sd_db < 0.0) fail("sigma_sd_db must be >= 0");
        if (gamma_ri < 0.0) fail("gamma_RI must be >= 0");
        if (nu < 0 || nu > 8) fail("nu out of range {0..8}");
        if (C_fh_bps <= 0) fail("C_fh_bps must be > 0");
        if (fronthaul_cap_denominator != 2 && fronthaul_cap_denominator != 4)
            fail("fronthaul_cap_denominator must be 2 or 4");
        if (alpha_ap <= 0 || alpha_ue <= 0) fail("amplifier efficiencies must be > 0");
        if (B_hz <= 0) fail("B_hz must be > 0");
        if (d0_km <= 0 || d1_km <= d0_km) fail("need 0 < d0_km < d1_km");
        if (!w_d.empty() && static_cast<int>(w_d.size()) != Kd) fail("w_d length must equal Kd");
        if (!w_u.empty() && static_cast<int>(w_u.size()) != Ku) fail("w_u length must equal Ku");
        for (double w : w_d)
            if (w < 0) fail("weights must be >= 0");
        for (double w : w_u)
            if (w < 0) fail("weights must be >= 0");
        if (!S_o_dl.empty() && static_cast<int>(S_o_dl.size()) != Kd) fail("S_o_dl length must equal Kd");
        if (!S_o_ul.empty() && static_cast<int>(S_o_ul.size()) != Ku) fail("S_o_ul length must equal Ku");
        if (estimation_mode != "direct" && estimation_mode != "pilot")
            fail("estimation_mode must be 'direct' or 'pilot'");
    }
};

/// One experiment: a scenario, which experiment to run, grids and trial
/// counts. The master seed is the only entropy source.
struct ExperimentSpec {
    SystemConfig scenario;
    std::string experiment;  // optional; validated against the known kinds
    std::uint64_t seed = 1;
    int trials = 1000;
    std::string out_dir = ".";
    std::vector<double> p_dbm_grid = {10.0, 20.0, 30.0};
    std::vector<int> nu_grid = {1, 2, 3, 4};
    std::vector<double> gamma_ri_db_grid = {-40.0, -30.0, -20.0, -10.0, 0.0};
    std::vector<double> c_fh_grid_bps = {1e7, 1e8};
    bool optimize_in_sweeps = true;
    std::string mode = "central";  // central | admm
};

inline bool experiment_kind_known(const std::string& kind) {
    static const char* kinds[] = {"quantizer-table", "topology-dump", "validate-bound",
                                  "term-oracle",     "sweep-power",   "sweep-nu",
                                  "sweep-ri",        "compare-hd",    "optimize-wsee"};
    for (const char* k : kinds)
        if (kind == k) return true;
    return false;
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw ConfigError("");
        return x;
    } catch (...) {
        throw ConfigError("config: value of '" + key + "' is not a number: '" + v + "'");
    }
}

inline int parse_int(const std::string& key, const std::string& v) {
    const double x = parse_double(key, v);
    const int i = static_cast<int>(std::llround(x));
    if (std::abs(x - i) > 1e-9) throw ConfigError("config: '" + key + "' must be an integer");
    return i;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw ConfigError("");
        return static_cast<std::uint64_t>(x);
    } catch (...) {
        throw ConfigError("config: '" + key + "' must be an unsigned integer");
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config: '" + key + "' must be true/false");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("config: empty element in list '" + key + "'");
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("config: '" + key + "' list is empty");
    return out;
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (double x : parse_list(key, v)) {
        const int i = static_cast<int>(std::llround(x));
        if (std::abs(x - i) > 1e-9) throw ConfigError("config: '" + key + "' must hold integers");
        out.push_back(i);
    }
    return out;
}

inline std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += fmt_double(v[i]);
    }
    return s;
}

inline std::string fmt_int_list(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s;
}

}  // namespace detail

/// Parses a key = value document. Unknown keys are rejected; omitted keys
/// keep the defaults above, so an empty document is the reference scenario.
inline ExperimentSpec parse_config(const std::string& text) {
    ExperimentSpec spec;
    SystemConfig& c = spec.scenario;
    bool kd_set = false, ku_set = false;

    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");

        using namespace detail;
        if (key == "M") c.M = parse_int(key, val);
        else if (key == "Nt") c.Nt = parse_int(key, val);
        else if (key == "Nr") c.Nr = parse_int(key, val);
        else if (key == "Kd") { c.Kd = parse_int(key, val); kd_set = true; }
        else if (key == "Ku") { c.Ku = parse_int(key, val); ku_set = true; }
        else if (key == "D_km") c.D_km = parse_double(key, val);
        else if (key == "tau_c") c.tau_c = parse_int(key, val);
        else if (key == "tau_td") { c.tau_td = parse_int(key, val); c.pilots_explicit = true; }
        else if (key == "tau_tu") { c.tau_tu = parse_int(key, val); c.pilots_explicit = true; }
        else if (key == "Tc_s") c.Tc_s = parse_double(key, val);
        else if (key == "p_t_w") c.p_t_w = parse_double(key, val);
        else if (key == "p_d_w") c.p_d_w = parse_double(key, val);
        else if (key == "p_u_w") c.p_u_w = parse_double(key, val);
        else if (key == "p_dbm") c.set_power_dbm(parse_double(key, val));
        else if (key == "N0_dbw") c.N0_dbw = parse_double(key, val);
        else if (key == "sigma_sd_db") c.sigma_sd_db = parse_double(key, val);
        else if (key == "delta") c.delta = parse_double(key, val);
        else if (key == "gamma_RI_db") c.gamma_ri = db_to_lin(parse_double(key, val));
        else if (key == "PL_RI_db") c.pl_ri_db = parse_double(key, val);
        else if (key == "nu") c.nu = parse_int(key, val);
        else if (key == "C_fh_bps") c.C_fh_bps = parse_double(key, val);
        else if (key == "fronthaul_cap_denominator") c.fronthaul_cap_denominator = parse_int(key, val);
        else if (key == "alpha_ap") c.alpha_ap = parse_double(key, val);
        else if (key == "alpha_ue") c.alpha_ue = parse_double(key, val);
        else if (key == "P0_w") c.P0_w = parse_double(key, val);
        else if (key == "Ptc_ap_w") c.Ptc_ap_w = parse_double(key, val);
        else if (key == "P_ft_w") c.P_ft_w = parse_double(key, val);
        else if (key == "Ptc_dl_w") c.Ptc_dl_w = parse_double(key, val);
        else if (key == "Ptc_ul_w") c.Ptc_ul_w = parse_double(key, val);
        else if (key == "B_hz") c.B_hz = parse_double(key, val);
        else if (key == "w_d") c.w_d = parse_list(key, val);
        else if (key == "w_u") c.w_u = parse_list(key, val);
        else if (key == "S_o_dl") c.S_o_dl = parse_list(key, val);
        else if (key == "S_o_ul") c.S_o_ul = parse_list(key, val);
        else if (key == "d0_km") c.d0_km = parse_double(key, val);
        else if (key == "d1_km") c.d1_km = parse_double(key, val);
        else if (key == "L_pl_db") c.L_pl_db = parse_double(key, val);
        else if (key == "estimation_mode") c.estimation_mode = val;
        else if (key == "experiment") spec.experiment = val;
        else if (key == "seed") spec.seed = parse_u64(key, val);
        else if (key == "trials") spec.trials = parse_int(key, val);
        else if (key == "out_dir") spec.out_dir = val;
        else if (key == "p_dbm_grid") spec.p_dbm_grid = parse_list(key, val);
        else if (key == "nu_grid") spec.nu_grid = parse_int_list(key, val);
        else if (key == "gamma_ri_db_grid") spec.gamma_ri_db_grid = parse_list(key, val);
        else if (key == "c_fh_grid_bps") spec.c_fh_grid_bps = parse_list(key, val);
        else if (key == "optimize_in_sweeps") spec.optimize_in_sweeps = parse_bool(key, val);
        else if (key == "mode") spec.mode = val;
        else throw ConfigError("config: unknown key '" + key + "'");
    }

    // Minimum orthogonal pilot lengths track the UE counts unless pinned.
    if (!c.pilots_explicit) {
        if (kd_set || c.tau_td < c.Kd) c.tau_td = c.Kd;
        if (ku_set || c.tau_tu < c.Ku) c.tau_tu = c.Ku;
    }

    if (!spec.experiment.empty() && !experiment_kind_known(spec.experiment))
        throw ConfigError("config: unknown experiment '" + spec.experiment + "'");
    if (spec.trials < 1) throw ConfigError("config: trials must be >= 1");
    if (spec.p_dbm_grid.empty() || spec.nu_grid.empty() || spec.gamma_ri_db_grid.empty() ||
        spec.c_fh_grid_bps.empty())
        throw ConfigError("config: sweep grids must be nonempty");
    for (int nu : spec.nu_grid)
        if (nu < 1 || nu > 8) throw ConfigError("config: nu_grid entries must be in 1..8");
    if (spec.mode != "central" && spec.mode != "admm")
        throw ConfigError("config: mode must be 'central' or 'admm'");
    c.validate();
    return spec;
}

/// Canonical serialization; parse(emit(spec)) == spec.
inline std::string emit_config(const ExperimentSpec& spec) {
    using namespace detail;
    const SystemConfig& c = spec.scenario;
    std::string s;
    auto kv = [&s](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
    kv("M", std::to_string(c.M));
    kv("Nt", std::to_string(c.Nt));
    kv("Nr", std::to_string(c.Nr));
    kv("Kd", std::to_string(c.Kd));
    kv("Ku", std::to_string(c.Ku));
    kv("D_km", fmt_double(c.D_km));
    kv("tau_c", std::to_string(c.tau_c));
    kv("tau_td", std::to_string(c.tau_td));
    kv("tau_tu", std::to_string(c.tau_tu));
    kv("Tc_s", fmt_double(c.Tc_s));
    kv("p_t_w", fmt_double(c.p_t_w));
    kv("p_d_w", fmt_double(c.p_d_w));
    kv("p_u_w", fmt_double(c.p_u_w));
    kv("N0_dbw", fmt_double(c.N0_dbw));
    kv("sigma_sd_db", fmt_double(c.sigma_sd_db));
    kv("delta", fmt_double(c.delta));
    kv("gamma_RI_db", fmt_double(lin_to_db(c.gamma_ri)));
    kv("PL_RI_db", fmt_double(c.pl_ri_db));
    kv("nu", std::to_string(c.nu));
    kv("C_fh_bps", fmt_double(c.C_fh_bps));
    kv("fronthaul_cap_denominator", std::to_string(c.fronthaul_cap_denominator));
    kv("alpha_ap", fmt_double(c.alpha_ap));
    kv("alpha_ue", fmt_double(c.alpha_ue));
    kv("P0_w", fmt_double(c.P0_w));
    kv("Ptc_ap_w", fmt_double(c.Ptc_ap_w));
    kv("P_ft_w", fmt_double(c.P_ft_w));
    kv("Ptc_dl_w", fmt_double(c.Ptc_dl_w));
    kv("Ptc_ul_w", fmt_double(c.Ptc_ul_w));
    kv("B_hz", fmt_double(c.B_hz));
    if (!c.w_d.empty()) kv("w_d", fmt_list(c.w_d));
    if (!c.w_u.empty()) kv("w_u", fmt_list(c.w_u));
    if (!c.S_o_dl.empty()) kv("S_o_dl", fmt_list(c.S_o_dl));
    if (!c.S_o_ul.empty()) kv("S_o_ul", fmt_list(c.S_o_ul));
    kv("d0_km", fmt_double(c.d0_km));
    kv("d1_km", fmt_double(c.d1_km));
    kv("L_pl_db", fmt_double(c.L_pl_db));
    kv("estimation_mode", c.estimation_mode);
    if (!spec.experiment.empty()) kv("experiment", spec.experiment);
    kv("seed", std::to_string(spec.seed));
    kv("trials", std::to_string(spec.trials));
    kv("out_dir", spec.out_dir);
    kv("p_dbm_grid", fmt_list(spec.p_dbm_grid));
    kv("nu_grid", fmt_int_list(spec.nu_grid));
    kv("gamma_ri_db_grid", fmt_list(spec.gamma_ri_db_grid));
    kv("c_fh_grid_bps", fmt_list(spec.c_fh_grid_bps));
    kv("optimize_in_sweeps", spec.optimize_in_sweeps ? "true" : "false");
    kv("mode", spec.mode);
    return s;
}

inline std::uint64_t config_hash(const ExperimentSpec& spec) { return fnv1a64(emit_config(spec)); }

}  // namespace fdcf

#endif
