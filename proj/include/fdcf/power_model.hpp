// SPDX-License-Identifier: Apache-2.0

#ifndef FDCF_POWER_MODEL_HPP
#define FDCF_POWER_MODEL_HPP

#include <Eigen/Dense>

#include "fdcf/se_model.hpp"

namespace fdcf {

/// Per-UE spectral efficiencies, consumed powers, energy efficiencies and
/// their weighted sum.
struct EnergyReport {
    Eigen::VectorXd se_d, se_u;  // bit/s/Hz
    Eigen::VectorXd p_d, p_u;    // W
    Eigen::VectorXd ee_d, ee_u;  // bit/J
    double wsee = 0.0;           // bit/J
};

/// Share of the AP infrastructure power charged to each UE: fixed part,
/// transceiver chains, and fronthaul traffic proportional to utilization.
inline double fixed_power(const ServingSets& sets, const SystemConfig& cfg) {
    double total = 0.0;
    for (int m = 0; m < cfg.M; ++m) {
        const double r_fh = fronthaul_rate(sets.K_dm(m), sets.K_um(m), cfg.nu, cfg);
        total += cfg.P0_w + (cfg.Nt + cfg.Nr) * cfg.Ptc_ap_w + cfg.P_ft_w * r_fh / cfg.C_fh_bps;
    }
    return total / cfg.K();
}

/// Power consumed per downlink / uplink UE (transmit chains plus the fixed
/// share). rho * N0 recovers the configured transmit power in watts.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> consumed_power(const PowerControl& pc,
                                                                  const ServingSets& sets,
                                                                  const LargeScaleState& st,
                                                                  const SystemConfig& cfg) {
    const double p_fix = fixed_power(sets, cfg);
    Eigen::VectorXd p_d(cfg.Kd), p_u(cfg.Ku);
    for (int k = 0; k < cfg.Kd; ++k) {
        double tx = 0.0;
        for (int m : sets.M_d[static_cast<std::size_t>(k)])
            tx += st.gamma_d(m, k) * pc.eta(m, k) / cfg.alpha_ap;
        p_d(k) = p_fix + cfg.Nt * cfg.rho_d() * cfg.N0_w() * tx + cfg.Ptc_dl_w;
    }
    for (int l = 0; l < cfg.Ku; ++l)
        p_u(l) = p_fix + cfg.rho_u() * cfg.N0_w() * pc.theta(l) / cfg.alpha_ue + cfg.Ptc_ul_w;
    return {p_d, p_u};
}

/// Assembles the energy report; the bandwidth factor B enters here (the
/// optimizer's internal objective drops it as a constant).
inline EnergyReport wsee_report(const Eigen::VectorXd& se_d, const Eigen::VectorXd& se_u,
                                const Eigen::VectorXd& p_d, const Eigen::VectorXd& p_u,
                                const SystemConfig& cfg) {
    EnergyReport rep;
    rep.se_d = se_d;
    rep.se_u = se_u;
    rep.p_d = p_d;
    rep.p_u = p_u;
    rep.ee_d = cfg.B_hz * se_d.array() / p_d.array();
    rep.ee_u = cfg.B_hz * se_u.array() / p_u.array();
    rep.wsee = 0.0;
    for (int k = 0; k < cfg.Kd; ++k) rep.wsee += cfg.weight_dl(k) * rep.ee_d(k);
    for (int l = 0; l < cfg.Ku; ++l) rep.wsee += cfg.weight_ul(l) * rep.ee_u(l);
    return rep;
}

/// Full evaluation of one power control point through the closed-form bound.
inline EnergyReport evaluate_wsee(const PowerControl& pc, const SEBoundCoefficients& co,
                                  const ServingSets& sets, const LargeScaleState& st,
                                  const SystemConfig& cfg) {
    const auto [se_d, se_u] = se_lb(co, pc);
    const auto [p_d, p_u] = consumed_power(pc, sets, st, cfg);
    return wsee_report(se_d, se_u, p_d, p_u, cfg);
}

}  // namespace fdcf

#endif
