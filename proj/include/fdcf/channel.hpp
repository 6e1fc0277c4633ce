// SPDX-License-Identifier: Apache-2.0

#ifndef FDCF_CHANNEL_HPP
#define FDCF_CHANNEL_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "fdcf/topology.hpp"

namespace fdcf {

enum class EstimationMode { DirectDraw, PilotProjection };

inline EstimationMode estimation_mode_of(const SystemConfig& cfg) {
    return cfg.estimation_mode == "pilot" ? EstimationMode::PilotProjection
                                          : EstimationMode::DirectDraw;
}

/// One small-scale realization: true channels, MMSE estimates, UE-to-UE
/// scalars and the residual AP-to-AP loop channels.
struct ChannelRealization {
    // Per AP m: columns are UEs. g is the true channel, ghat the estimate.
    std::vector<Eigen::MatrixXcd> g_d, ghat_d;  // Nt x Kd
    std::vector<Eigen::MatrixXcd> g_u, ghat_u;  // Nr x Ku
    Eigen::MatrixXcd h_udi;                     // Kd x Ku
    std::vector<Eigen::MatrixXcd> h_ri;         // index m*M+i, each Nr x Nt

    const Eigen::MatrixXcd& ri(int m, int i, int M) const {
        return h_ri[static_cast<std::size_t>(m) * M + i];
    }
};

namespace detail {

inline Eigen::VectorXcd cgaussian_vec(int n, double variance, Rng& rng) {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.cgaussian(variance);
    return v;
}

/// True channel plus MMSE estimate for one link with per-entry variance beta.
/// Direct mode draws estimate and error from their exact marginals; pilot
/// mode runs the projection ghat = c (sqrt(tau rho) g + n).
inline void draw_link(Eigen::Ref<Eigen::VectorXcd> g, Eigen::Ref<Eigen::VectorXcd> ghat,
                      double beta, double gamma, double tau_t, double rho_t,
                      EstimationMode mode, Rng& rng) {
    const int n = static_cast<int>(g.size());
    if (mode == EstimationMode::DirectDraw) {
        ghat = cgaussian_vec(n, gamma, rng);
        g = ghat + cgaussian_vec(n, std::max(0.0, beta - gamma), rng);
    } else {
        g = cgaussian_vec(n, beta, rng);
        const double s = std::sqrt(tau_t * rho_t);
        const double c = beta <= 0.0 ? 0.0 : s * beta / (tau_t * rho_t * beta + 1.0);
        ghat = c * (s * g + cgaussian_vec(n, 1.0, rng));
    }
}

}  // namespace detail

/// Draws one full realization. The draw order is fixed so that a substream
/// seed pins the realization regardless of caller.
inline ChannelRealization sample_realization(const LargeScaleState& st, const SystemConfig& cfg,
                                             Rng& rng, EstimationMode mode) {
    const int M = cfg.M, Kd = cfg.Kd, Ku = cfg.Ku, Nt = cfg.Nt, Nr = cfg.Nr;
    ChannelRealization cr;
    cr.g_d.assign(M, Eigen::MatrixXcd(Nt, Kd));
    cr.ghat_d.assign(M, Eigen::MatrixXcd(Nt, Kd));
    cr.g_u.assign(M, Eigen::MatrixXcd(Nr, Ku));
    cr.ghat_u.assign(M, Eigen::MatrixXcd(Nr, Ku));
    cr.h_udi.resize(Kd, Ku);
    cr.h_ri.assign(static_cast<std::size_t>(M) * M, Eigen::MatrixXcd(Nr, Nt));

    for (int m = 0; m < M; ++m)
        for (int k = 0; k < Kd; ++k)
            detail::draw_link(cr.g_d[m].col(k), cr.ghat_d[m].col(k), st.beta_d(m, k),
                              st.gamma_d(m, k), cfg.tau_td, cfg.rho_t(), mode, rng);
    for (int m = 0; m < M; ++m)
        for (int l = 0; l < Ku; ++l)
            detail::draw_link(cr.g_u[m].col(l), cr.ghat_u[m].col(l), st.beta_u(m, l),
                              st.gamma_u(m, l), cfg.tau_tu, cfg.rho_t(), mode, rng);
    for (int k = 0; k < Kd; ++k)
        for (int l = 0; l < Ku; ++l) cr.h_udi(k, l) = rng.cgaussian(st.beta_udi(k, l));
    for (int m = 0; m < M; ++m)
        for (int i = 0; i < M; ++i) {
            auto& h = cr.h_ri[static_cast<std::size_t>(m) * M + i];
            const double var = st.beta_ri(m, i) * cfg.gamma_ri;
            for (int r = 0; r < Nr; ++r)
                for (int c = 0; c < Nt; ++c) h(r, c) = rng.cgaussian(var);
        }
    return cr;
}

inline ChannelRealization sample_realization(const LargeScaleState& st, const SystemConfig& cfg,
                                             Rng& rng) {
    return sample_realization(st, cfg, rng, estimation_mode_of(cfg));
}

}  // namespace fdcf

#endif
