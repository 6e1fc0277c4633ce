// SPDX-License-Identifier: Apache-2.0

#ifndef FDCF_SE_MODEL_HPP
#define FDCF_SE_MODEL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "fdcf/fronthaul.hpp"
#include "fdcf/quantizer.hpp"

namespace fdcf {

/// Coefficients of the closed-form SE lower bounds. Downlink UE k:
///   SINR_k = (sum_m A_d(m,k) c_mk)^2 / (sum_mq B_d[k](m,q) eta_mq
///            + sum_l D_d(k,l) theta_l + 1),
/// uplink UE l:
///   SINR_l = A_u(l) theta_l / (sum_q B_u(l,q) theta_q
///            + sum_ik D_u[l](i,k) eta_ik + E_u(l) theta_l + F_u(l)).
/// Entries involving pairs outside the serving sets are zero.
struct SEBoundCoefficients {
    double tau_f = 1.0;
    Eigen::MatrixXd A_d;               // M x Kd
    std::vector<Eigen::MatrixXd> B_d;  // per downlink UE k: M x Kd over (m, q)
    Eigen::MatrixXd D_d;               // Kd x Ku
    Eigen::VectorXd A_u;               // Ku
    Eigen::MatrixXd B_u;               // Ku x Ku over (l, q), q = l included
    std::vector<Eigen::MatrixXd> D_u;  // per uplink UE l: M x Kd over (i, k)
    Eigen::VectorXd E_u;               // Ku
    Eigen::VectorXd F_u;               // Ku
};

/// Power control: downlink per-(AP, UE) coefficients eta (zero off the
/// serving set) and uplink per-UE fractions theta in [0, 1].
struct PowerControl {
    Eigen::MatrixXd eta;    // M x Kd
    Eigen::VectorXd theta;  // Ku

    Eigen::MatrixXd amplitudes() const { return eta.cwiseSqrt(); }
};

inline SEBoundCoefficients se_coefficients(const LargeScaleState& st, const ServingSets& sets,
                                           const QuantizerParams& q, const SystemConfig& cfg) {
    const int M = cfg.M, Kd = cfg.Kd, Ku = cfg.Ku;
    const double a = q.a_tilde, b = q.b_tilde;
    const double rho_d = cfg.rho_d(), rho_u = cfg.rho_u();

    SEBoundCoefficients co;
    co.tau_f = cfg.tau_f();
    co.A_d = Eigen::MatrixXd::Zero(M, Kd);
    co.B_d.assign(static_cast<std::size_t>(Kd), Eigen::MatrixXd::Zero(M, Kd));
    co.D_d.resize(Kd, Ku);
    co.A_u = Eigen::VectorXd::Zero(Ku);
    co.B_u = Eigen::MatrixXd::Zero(Ku, Ku);
    co.D_u.assign(static_cast<std::size_t>(Ku), Eigen::MatrixXd::Zero(M, Kd));
    co.E_u = Eigen::VectorXd::Zero(Ku);
    co.F_u = Eigen::VectorXd::Zero(Ku);

    for (int m = 0; m < M; ++m)
        for (int k : sets.kappa_d[static_cast<std::size_t>(m)])
            co.A_d(m, k) = a * cfg.Nt * std::sqrt(rho_d) * st.gamma_d(m, k);

    for (int k = 0; k < Kd; ++k) {
        auto& Bk = co.B_d[static_cast<std::size_t>(k)];
        for (int m = 0; m < M; ++m)
            for (int qd : sets.kappa_d[static_cast<std::size_t>(m)])
                Bk(m, qd) = b * cfg.Nt * rho_d * st.beta_d(m, k) * st.gamma_d(m, qd);
    }

    for (int k = 0; k < Kd; ++k)
        for (int l = 0; l < Ku; ++l) co.D_d(k, l) = rho_u * st.beta_udi(k, l);

    for (int l = 0; l < Ku; ++l) {
        const auto& serving = sets.M_u[static_cast<std::size_t>(l)];
        double gsum = 0.0, gsq = 0.0;
        for (int m : serving) {
            gsum += st.gamma_u(m, l);
            gsq += st.gamma_u(m, l) * st.gamma_u(m, l);
        }
        co.A_u(l) = a * a * cfg.Nr * cfg.Nr * rho_u * gsum * gsum;
        co.E_u(l) = (b - a * a) * cfg.Nr * cfg.Nr * rho_u * gsq;
        co.F_u(l) = b * cfg.Nr * gsum;
        for (int qu = 0; qu < Ku; ++qu) {
            double s = 0.0;
            for (int m : serving) s += st.gamma_u(m, l) * st.beta_u(m, qu);
            co.B_u(l, qu) = b * cfg.Nr * rho_u * s;
        }
        auto& Dl = co.D_u[static_cast<std::size_t>(l)];
        for (int i = 0; i < M; ++i) {
            double s = 0.0;
            for (int m : serving) s += st.gamma_u(m, l) * st.beta_ri(m, i);
            const double common = b * b * cfg.Nr * cfg.Nt * rho_d * cfg.gamma_ri * s;
            for (int k : sets.kappa_d[static_cast<std::size_t>(i)]) Dl(i, k) = common * st.gamma_d(i, k);
        }
    }
    return co;
}

/// Downlink SINR denominator (the +1 noise term included).
inline double dl_denominator(const SEBoundCoefficients& co, const PowerControl& pc, int k) {
    const auto& Bk = co.B_d[static_cast<std::size_t>(k)];
    return (Bk.array() * pc.eta.array()).sum() + co.D_d.row(k).dot(pc.theta) + 1.0;
}

/// Uplink SINR denominator.
inline double ul_denominator(const SEBoundCoefficients& co, const PowerControl& pc, int l) {
    const auto& Dl = co.D_u[static_cast<std::size_t>(l)];
    return co.B_u.row(l).dot(pc.theta) + (Dl.array() * pc.eta.array()).sum() +
           co.E_u(l) * pc.theta(l) + co.F_u(l);
}

/// Closed-form SE lower bounds for every UE at the given power control.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> se_lb(const SEBoundCoefficients& co,
                                                         const PowerControl& pc) {
    const int Kd = static_cast<int>(co.A_d.cols());
    const int Ku = static_cast<int>(co.A_u.size());
    Eigen::VectorXd se_d(Kd), se_u(Ku);
    const Eigen::MatrixXd c = pc.amplitudes();
    for (int k = 0; k < Kd; ++k) {
        const double num = std::pow(co.A_d.col(k).dot(c.col(k)), 2);
        se_d(k) = num <= 0.0 ? 0.0 : co.tau_f * std::log2(1.0 + num / dl_denominator(co, pc, k));
    }
    for (int l = 0; l < Ku; ++l) {
        const double num = co.A_u(l) * pc.theta(l);
        const double den = ul_denominator(co, pc, l);
        se_u(l) = (num <= 0.0 || den <= 0.0) ? 0.0 : co.tau_f * std::log2(1.0 + num / den);
    }
    return {se_d, se_u};
}

/// Checks the per-AP transmit constraint b_tilde sum_k gamma eta <= 1/Nt and
/// the uplink box 0 <= theta <= 1.
inline bool power_constraints_ok(const PowerControl& pc, const LargeScaleState& st,
                                 const ServingSets& sets, const QuantizerParams& q,
                                 const SystemConfig& cfg, double tol = 1e-9) {
    for (int m = 0; m < cfg.M; ++m) {
        double s = 0.0;
        for (int k = 0; k < cfg.Kd; ++k) {
            if (pc.eta(m, k) < -tol) return false;
            if (pc.eta(m, k) > 0.0 && !sets.serves_dl(m, k)) return false;
            s += st.gamma_d(m, k) * pc.eta(m, k);
        }
        if (q.b_tilde * s > 1.0 / cfg.Nt + tol) return false;
    }
    for (int l = 0; l < cfg.Ku; ++l)
        if (pc.theta(l) < -tol || pc.theta(l) > 1.0 + tol) return false;
    return true;
}

enum class BaselineKind { EPA1, EPA2, RPA };

/// Reference allocations: EPA1 splits each AP's budget over its served UEs
/// jointly, EPA2 per UE, RPA draws uniformly below the EPA1 value. Uplink
/// runs at full power (EPA) or uniform random (RPA).
inline PowerControl baseline_allocation(BaselineKind kind, const LargeScaleState& st,
                                        const ServingSets& sets, const QuantizerParams& q,
                                        const SystemConfig& cfg, std::uint64_t seed = 0) {
    PowerControl pc;
    pc.eta = Eigen::MatrixXd::Zero(cfg.M, cfg.Kd);
    pc.theta = Eigen::VectorXd::Ones(cfg.Ku);
    Rng rng = substream(seed, "rpa");
    for (int m = 0; m < cfg.M; ++m) {
        const auto& served = sets.kappa_d[static_cast<std::size_t>(m)];
        if (served.empty()) continue;
        double gsum = 0.0;
        for (int k : served) gsum += st.gamma_d(m, k);
        for (int k : served) {
            double eta = 0.0;
            switch (kind) {
                case BaselineKind::EPA1:
                    eta = 1.0 / (q.b_tilde * cfg.Nt * gsum);
                    break;
                case BaselineKind::EPA2:
                    eta = 1.0 / (q.b_tilde * cfg.Nt * static_cast<double>(served.size()) *
                                 st.gamma_d(m, k));
                    break;
                case BaselineKind::RPA:
                    eta = rng.uniform01() / (q.b_tilde * cfg.Nt * gsum);
                    break;
            }
            pc.eta(m, k) = eta;
        }
    }
    if (kind == BaselineKind::RPA)
        for (int l = 0; l < cfg.Ku; ++l) pc.theta(l) = rng.uniform01();
    return pc;
}

/// Scenario variant used for the half-duplex comparison: all antennas pooled
/// on each side, no loop interference and no UE-to-UE interference.
inline SystemConfig hd_equivalent_config(const SystemConfig& cfg) {
    SystemConfig hd = cfg;
    hd.Nt = cfg.Nt + cfg.Nr;
    hd.Nr = cfg.Nt + cfg.Nr;
    hd.gamma_ri = 0.0;
    return hd;
}

/// Sum SE of the time-division equivalent: the bound evaluated with pooled
/// antennas and the cross-direction couplings zeroed, halved for the duplex
/// split. `pc` must respect the pooled-antenna power constraint.
inline double hd_equivalent_sum_se(const LargeScaleState& st, const ServingSets& sets,
                                   const QuantizerParams& q, const PowerControl& pc,
                                   const SystemConfig& cfg) {
    const SystemConfig hd = hd_equivalent_config(cfg);
    LargeScaleState st_hd = st;
    st_hd.beta_udi.setZero();
    SEBoundCoefficients co = se_coefficients(st_hd, sets, q, hd);
    const auto [se_d, se_u] = se_lb(co, pc);
    return 0.5 * (se_d.sum() + se_u.sum());
}

}  // namespace fdcf

#endif
