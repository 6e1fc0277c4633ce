// SPDX-License-Identifier: Apache-2.0

#ifndef FDCF_TOPOLOGY_HPP
#define FDCF_TOPOLOGY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "fdcf/config.hpp"
#include "fdcf/rng.hpp"
#include "fdcf/util.hpp"

namespace fdcf {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Deployment {
    double D_km = 1.0;
    std::vector<Point> aps;
    std::vector<Point> dl_ues;
    std::vector<Point> ul_ues;
};

/// Distance on the wrap-around square (torus metric); equals the minimum
/// over the 9 shifted images of one endpoint.
inline double torus_distance(const Point& a, const Point& b, double D) {
    double dx = std::fabs(a.x - b.x);
    double dy = std::fabs(a.y - b.y);
    dx = std::min(dx, D - dx);
    dy = std::min(dy, D - dy);
    return std::hypot(dx, dy);
}

/// Scatters APs and UEs uniformly over the square. Draw order is fixed
/// (APs, downlink UEs, uplink UEs) so a seed pins the deployment.
inline Deployment deploy(const SystemConfig& cfg, Rng& rng) {
    Deployment dep;
    dep.D_km = cfg.D_km;
    auto draw = [&](int n, std::vector<Point>& out) {
        out.resize(static_cast<std::size_t>(n));
        for (auto& p : out) {
            p.x = rng.uniform(0.0, cfg.D_km);
            p.y = rng.uniform(0.0, cfg.D_km);
        }
    };
    draw(cfg.M, dep.aps);
    draw(cfg.Kd, dep.dl_ues);
    draw(cfg.Ku, dep.ul_ues);
    return dep;
}

inline Deployment deploy(const SystemConfig& cfg, std::uint64_t seed) {
    Rng rng = substream(seed, "deploy");
    return deploy(cfg, rng);
}

/// Three-slope path loss in dB; constant below d0, 20 dB/decade between d0
/// and d1, 35 dB/decade beyond d1. Distances in km.
inline double path_loss_db(double d_km, const SystemConfig& cfg) {
    const double L = cfg.L_pl_db;
    if (d_km > cfg.d1_km) return -L - 35.0 * std::log10(d_km);
    const double mid = -L - 15.0 * std::log10(cfg.d1_km);
    if (d_km > cfg.d0_km) return mid - 20.0 * std::log10(d_km);
    return mid - 20.0 * std::log10(cfg.d0_km);
}

/// MMSE channel-estimate variance gamma = tau rho beta^2 / (tau rho beta + 1).
inline double mmse_gamma(double beta, double tau_t, double rho_t) {
    if (beta <= 0.0) return 0.0;
    const double trb = tau_t * rho_t * beta;
    return trb * beta / (trb + 1.0);
}

/// Large-scale gains and estimation variances for every link class.
struct LargeScaleState {
    Eigen::MatrixXd beta_d;    // M x Kd
    Eigen::MatrixXd beta_u;    // M x Ku
    Eigen::MatrixXd beta_udi;  // Kd x Ku, uplink-UE -> downlink-UE
    Eigen::MatrixXd beta_ri;   // M x M, transmit AP i -> receive AP m at (m, i)
    Eigen::MatrixXd gamma_d;   // M x Kd
    Eigen::MatrixXd gamma_u;   // M x Ku
};

/// Draws correlated shadowing (weight delta between the AP and UE
/// components) on top of the three-slope path loss, then the estimation
/// variances. Intra-AP entries carry the fixed residual-loop loss and no
/// shadowing.
inline LargeScaleState large_scale(const Deployment& dep, const SystemConfig& cfg, Rng& rng) {
    const int M = cfg.M, Kd = cfg.Kd, Ku = cfg.Ku;
    LargeScaleState st;
    st.beta_d.resize(M, Kd);
    st.beta_u.resize(M, Ku);
    st.beta_udi.resize(Kd, Ku);
    st.beta_ri.resize(M, M);
    st.gamma_d.resize(M, Kd);
    st.gamma_u.resize(M, Ku);

    std::vector<double> a_ap(static_cast<std::size_t>(M));
    std::vector<double> b_dl(static_cast<std::size_t>(Kd));
    std::vector<double> b_ul(static_cast<std::size_t>(Ku));
    for (auto& v : a_ap) v = rng.normal();
    for (auto& v : b_dl) v = rng.normal();
    for (auto& v : b_ul) v = rng.normal();

    const double wa = std::sqrt(cfg.delta);
    const double wb = std::sqrt(1.0 - cfg.delta);
    auto gain = [&](double d_km, double z) {
        return db_to_lin(path_loss_db(d_km, cfg) + cfg.sigma_sd_db * z);
    };

    for (int m = 0; m < M; ++m)
        for (int k = 0; k < Kd; ++k) {
            const double d = torus_distance(dep.aps[m], dep.dl_ues[k], cfg.D_km);
            st.beta_d(m, k) = gain(d, wa * a_ap[m] + wb * b_dl[k]);
            st.gamma_d(m, k) = mmse_gamma(st.beta_d(m, k), cfg.tau_td, cfg.rho_t());
        }
    for (int m = 0; m < M; ++m)
        for (int l = 0; l < Ku; ++l) {
            const double d = torus_distance(dep.aps[m], dep.ul_ues[l], cfg.D_km);
            st.beta_u(m, l) = gain(d, wa * a_ap[m] + wb * b_ul[l]);
            st.gamma_u(m, l) = mmse_gamma(st.beta_u(m, l), cfg.tau_tu, cfg.rho_t());
        }
    // UE-to-UE links get fresh shadowing per pair.
    for (int k = 0; k < Kd; ++k)
        for (int l = 0; l < Ku; ++l) {
            const double d = torus_distance(dep.dl_ues[k], dep.ul_ues[l], cfg.D_km);
            st.beta_udi(k, l) = gain(d, rng.normal());
        }
    for (int m = 0; m < M; ++m)
        for (int i = 0; i < M; ++i) {
            if (m == i) {
                st.beta_ri(m, i) = db_to_lin(cfg.pl_ri_db);
            } else {
                const double d = torus_distance(dep.aps[m], dep.aps[i], cfg.D_km);
                st.beta_ri(m, i) = gain(d, wa * a_ap[m] + wb * a_ap[i]);
            }
        }
    return st;
}

inline LargeScaleState large_scale(const Deployment& dep, const SystemConfig& cfg,
                                   std::uint64_t seed) {
    Rng rng = substream(seed, "shadow");
    return large_scale(dep, cfg, rng);
}

}  // namespace fdcf

#endif
