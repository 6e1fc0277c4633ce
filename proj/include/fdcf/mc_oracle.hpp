// SPDX-License-Identifier: Apache-2.0

#ifndef FDCF_MC_ORACLE_HPP
#define FDCF_MC_ORACLE_HPP

#include <complex>
#include <vector>

#include "fdcf/channel.hpp"
#include "fdcf/se_model.hpp"

namespace fdcf {

/// Monte-Carlo ergodic SE (the instantaneous-CSI upper reference for the
/// closed-form lower bound) with per-UE standard errors.
struct McSeResult {
    Eigen::VectorXd ub_d, ub_u;
    Eigen::VectorXd stderr_d, stderr_u;
};

/// Per-UE interference term powers, one entry per UE.
struct TermPowers {
    Eigen::VectorXd dl_ds, dl_bu, dl_mui, dl_udi, dl_tqd;
    Eigen::VectorXd ul_ds, ul_bu, ul_mui, ul_ri, ul_n, ul_tqd;
};

namespace detail {

using cplx = std::complex<double>;

/// Per-realization conditional powers (symbols, receiver noise and
/// quantization distortion averaged out; channels held fixed). Quantization
/// follows the attenuation-plus-independent-distortion model: distortion
/// power (b - a^2) times the conditional power of the quantizer input.
struct TrialTerms {
    // downlink, per k
    std::vector<cplx> dl_sig_amp;  // coherent desired-signal amplitude
    std::vector<cplx> dl_bu_amp;   // amplitude deviation from the mean
    std::vector<double> dl_mui, dl_udi, dl_tqd;
    // uplink, per l
    std::vector<cplx> ul_sig_amp, ul_bu_amp;
    std::vector<double> ul_mui, ul_ri, ul_n, ul_tqd;
    double ul_sig_gain = 1.0;
};

inline TrialTerms trial_terms(const ChannelRealization& cr, const LargeScaleState& st,
                              const ServingSets& sets, const QuantizerParams& q,
                              const PowerControl& pc, const SystemConfig& cfg) {
    const int M = cfg.M, Kd = cfg.Kd, Ku = cfg.Ku;
    const double a2 = q.a_tilde * q.a_tilde;
    const double dist = q.distortion();
    const double rho_d = cfg.rho_d(), rho_u = cfg.rho_u();
    const Eigen::MatrixXd c = pc.amplitudes();

    TrialTerms t;
    t.dl_sig_amp.assign(static_cast<std::size_t>(Kd), cplx{});
    t.dl_bu_amp.assign(static_cast<std::size_t>(Kd), cplx{});
    t.dl_mui.assign(static_cast<std::size_t>(Kd), 0.0);
    t.dl_udi.assign(static_cast<std::size_t>(Kd), 0.0);
    t.dl_tqd.assign(static_cast<std::size_t>(Kd), 0.0);
    t.ul_sig_amp.assign(static_cast<std::size_t>(Ku), cplx{});
    t.ul_bu_amp.assign(static_cast<std::size_t>(Ku), cplx{});
    t.ul_mui.assign(static_cast<std::size_t>(Ku), 0.0);
    t.ul_ri.assign(static_cast<std::size_t>(Ku), 0.0);
    t.ul_n.assign(static_cast<std::size_t>(Ku), 0.0);
    t.ul_tqd.assign(static_cast<std::size_t>(Ku), 0.0);

    // --- downlink ---
    for (int k = 0; k < Kd; ++k) {
        // amp[q]: received amplitude at UE k of the symbol meant for UE q.
        std::vector<cplx> amp(static_cast<std::size_t>(Kd), cplx{});
        double tqd = 0.0;
        for (int m = 0; m < M; ++m) {
            const auto gk = cr.g_d[static_cast<std::size_t>(m)].col(k);
            for (int qd : sets.kappa_d[static_cast<std::size_t>(m)]) {
                const cplx inner = cr.ghat_d[static_cast<std::size_t>(m)].col(qd).dot(gk);
                amp[static_cast<std::size_t>(qd)] += c(m, qd) * inner;
                tqd += pc.eta(m, qd) * std::norm(inner);
            }
        }
        t.dl_sig_amp[static_cast<std::size_t>(k)] = amp[static_cast<std::size_t>(k)];
        double mean_gain = 0.0;
        for (int m : sets.M_d[static_cast<std::size_t>(k)]) mean_gain += c(m, k) * cfg.Nt * st.gamma_d(m, k);
        t.dl_bu_amp[static_cast<std::size_t>(k)] = amp[static_cast<std::size_t>(k)] - mean_gain;
        double mui = 0.0;
        for (int qd = 0; qd < Kd; ++qd)
            if (qd != k) mui += std::norm(amp[static_cast<std::size_t>(qd)]);
        t.dl_mui[static_cast<std::size_t>(k)] = a2 * rho_d * mui;
        double udi = 0.0;
        for (int l = 0; l < Ku; ++l) udi += pc.theta(l) * std::norm(cr.h_udi(k, l));
        t.dl_udi[static_cast<std::size_t>(k)] = rho_u * udi;
        t.dl_tqd[static_cast<std::size_t>(k)] = rho_d * dist * tqd;
    }

    // --- uplink ---
    for (int l = 0; l < Ku; ++l) {
        const auto& serving = sets.M_u[static_cast<std::size_t>(l)];
        cplx sig{};
        double mean_gain = 0.0, n_pow = 0.0, mui = 0.0;
        std::vector<cplx> mui_amp(static_cast<std::size_t>(Ku), cplx{});
        // Coherent (shared downlink symbol) and per-link (independent
        // distortion) loop-interference aggregates.
        Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(M, Kd);  // sum over serving m
        double ri_incoh = 0.0;                               // sum eta |z|^2 over (m,i,k)
        double tqd = 0.0;

        for (int m : serving) {
            const auto u = cr.ghat_u[static_cast<std::size_t>(m)].col(l);
            n_pow += u.squaredNorm();
            for (int qu = 0; qu < Ku; ++qu)
                mui_amp[static_cast<std::size_t>(qu)] += u.dot(cr.g_u[static_cast<std::size_t>(m)].col(qu));
            mean_gain += cfg.Nr * st.gamma_u(m, l);

            // Quantizer-input power at AP m, conditioned on the channels.
            double pm_ul = 0.0;
            for (int qu = 0; qu < Ku; ++qu)
                pm_ul += pc.theta(qu) *
                         std::norm(u.dot(cr.g_u[static_cast<std::size_t>(m)].col(qu)));
            double pm_dl_coh = 0.0, pm_dl_dist = 0.0;
            std::vector<cplx> coh_m(static_cast<std::size_t>(Kd), cplx{});
            for (int i = 0; i < M; ++i) {
                const auto& kap = sets.kappa_d[static_cast<std::size_t>(i)];
                if (kap.empty()) continue;
                // z_ik = u^H H_{mi} conj(ghat_d[i,k]), up to a global
                // conjugation that no squared magnitude below can see.
                const Eigen::VectorXcd w = cr.ri(m, i, M).adjoint() * u;
                for (int kd : kap) {
                    const cplx z =
                        (w.array() * cr.ghat_d[static_cast<std::size_t>(i)].col(kd).array()).sum();
                    G(i, kd) += z;
                    coh_m[static_cast<std::size_t>(kd)] += c(i, kd) * z;
                    pm_dl_dist += pc.eta(i, kd) * std::norm(z);
                    ri_incoh += pc.eta(i, kd) * std::norm(z);
                }
            }
            for (int kd = 0; kd < Kd; ++kd) pm_dl_coh += std::norm(coh_m[static_cast<std::size_t>(kd)]);
            const double pm = rho_u * pm_ul + rho_d * (a2 * pm_dl_coh + dist * pm_dl_dist) +
                              u.squaredNorm();
            tqd += pm;
        }

        sig = mui_amp[static_cast<std::size_t>(l)];
        for (int qu = 0; qu < Ku; ++qu)
            if (qu != l) mui += pc.theta(qu) * std::norm(mui_amp[static_cast<std::size_t>(qu)]);

        double ri_coh = 0.0;
        for (int kd = 0; kd < Kd; ++kd) {
            cplx s{};
            for (int i : sets.M_d[static_cast<std::size_t>(kd)]) s += c(i, kd) * G(i, kd);
            ri_coh += std::norm(s);
        }

        t.ul_sig_amp[static_cast<std::size_t>(l)] = sig;
        t.ul_bu_amp[static_cast<std::size_t>(l)] = sig - mean_gain;
        t.ul_mui[static_cast<std::size_t>(l)] = a2 * rho_u * mui;
        t.ul_ri[static_cast<std::size_t>(l)] = a2 * rho_d * (a2 * ri_coh + dist * ri_incoh);
        t.ul_n[static_cast<std::size_t>(l)] = a2 * n_pow;
        t.ul_tqd[static_cast<std::size_t>(l)] = dist * tqd;
    }
    return t;
}

}  // namespace detail

/// Sample average of log2(1 + SINR) over channel realizations, with the
/// SINR assembled from the conditional signal/interference/noise powers.
inline McSeResult mc_ergodic_se(const LargeScaleState& st, const ServingSets& sets,
                                const QuantizerParams& q, const PowerControl& pc,
                                const SystemConfig& cfg, int trials, std::uint64_t seed) {
    const int Kd = cfg.Kd, Ku = cfg.Ku;
    const double a2 = q.a_tilde * q.a_tilde;
    const double rho_d = cfg.rho_d(), rho_u = cfg.rho_u();
    std::vector<std::vector<double>> samp_d(static_cast<std::size_t>(Kd)),
        samp_u(static_cast<std::size_t>(Ku));
    for (auto& v : samp_d) v.resize(static_cast<std::size_t>(trials));
    for (auto& v : samp_u) v.resize(static_cast<std::size_t>(trials));

    const EstimationMode mode = estimation_mode_of(cfg);
    for (int t = 0; t < trials; ++t) {
        Rng rng = substream(seed, "mc-se", static_cast<std::uint64_t>(t));
        const ChannelRealization cr = sample_realization(st, cfg, rng, mode);
        const auto tt = detail::trial_terms(cr, st, sets, q, pc, cfg);
        for (int k = 0; k < Kd; ++k) {
            const double p = a2 * rho_d * std::norm(tt.dl_sig_amp[static_cast<std::size_t>(k)]);
            const double den = tt.dl_mui[static_cast<std::size_t>(k)] +
                               tt.dl_udi[static_cast<std::size_t>(k)] +
                               tt.dl_tqd[static_cast<std::size_t>(k)] + 1.0;
            samp_d[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] = std::log2(1.0 + p / den);
        }
        for (int l = 0; l < Ku; ++l) {
            const double p =
                a2 * rho_u * pc.theta(l) * std::norm(tt.ul_sig_amp[static_cast<std::size_t>(l)]);
            const double den = tt.ul_mui[static_cast<std::size_t>(l)] +
                               tt.ul_ri[static_cast<std::size_t>(l)] +
                               tt.ul_tqd[static_cast<std::size_t>(l)] +
                               tt.ul_n[static_cast<std::size_t>(l)];
            samp_u[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)] =
                den <= 0.0 ? 0.0 : std::log2(1.0 + p / den);
        }
    }

    McSeResult res;
    res.ub_d.resize(Kd);
    res.stderr_d.resize(Kd);
    res.ub_u.resize(Ku);
    res.stderr_u.resize(Ku);
    const double tf = cfg.tau_f();
    for (int k = 0; k < Kd; ++k) {
        res.ub_d(k) = tf * pairwise_mean(samp_d[static_cast<std::size_t>(k)]);
        res.stderr_d(k) = tf * stderr_of_mean(samp_d[static_cast<std::size_t>(k)]);
    }
    for (int l = 0; l < Ku; ++l) {
        res.ub_u(l) = tf * pairwise_mean(samp_u[static_cast<std::size_t>(l)]);
        res.stderr_u(l) = tf * stderr_of_mean(samp_u[static_cast<std::size_t>(l)]);
    }
    return res;
}

/// Closed-form per-term powers backing the SE bound denominators.
inline TermPowers closed_term_powers(const LargeScaleState& st, const ServingSets& sets,
                                     const QuantizerParams& q, const PowerControl& pc,
                                     const SystemConfig& cfg) {
    const int M = cfg.M, Kd = cfg.Kd, Ku = cfg.Ku, Nt = cfg.Nt, Nr = cfg.Nr;
    const double a2 = q.a_tilde * q.a_tilde;
    const double b = q.b_tilde;
    const double dist = q.distortion();
    const double rho_d = cfg.rho_d(), rho_u = cfg.rho_u();
    const Eigen::MatrixXd c = pc.amplitudes();

    TermPowers tp;
    tp.dl_ds.resize(Kd);
    tp.dl_bu.resize(Kd);
    tp.dl_mui.resize(Kd);
    tp.dl_udi.resize(Kd);
    tp.dl_tqd.resize(Kd);
    for (int k = 0; k < Kd; ++k) {
        double ds_amp = 0.0, bu = 0.0;
        for (int m : sets.M_d[static_cast<std::size_t>(k)]) {
            ds_amp += c(m, k) * st.gamma_d(m, k);
            bu += pc.eta(m, k) * st.beta_d(m, k) * st.gamma_d(m, k);
        }
        double mui = 0.0, tqd = 0.0;
        for (int m = 0; m < M; ++m)
            for (int qd : sets.kappa_d[static_cast<std::size_t>(m)]) {
                const double term = st.beta_d(m, k) * pc.eta(m, qd) * st.gamma_d(m, qd);
                if (qd != k) mui += term;
                tqd += term;
            }
        double udi = 0.0;
        for (int l = 0; l < Ku; ++l) udi += st.beta_udi(k, l) * pc.theta(l);
        tp.dl_ds(k) = a2 * Nt * Nt * rho_d * ds_amp * ds_amp;
        tp.dl_bu(k) = a2 * Nt * rho_d * bu;
        tp.dl_mui(k) = a2 * Nt * rho_d * mui;
        tp.dl_udi(k) = rho_u * udi;
        tp.dl_tqd(k) = dist * Nt * rho_d * tqd;
    }

    tp.ul_ds.resize(Ku);
    tp.ul_bu.resize(Ku);
    tp.ul_mui.resize(Ku);
    tp.ul_ri.resize(Ku);
    tp.ul_n.resize(Ku);
    tp.ul_tqd.resize(Ku);
    for (int l = 0; l < Ku; ++l) {
        const auto& serving = sets.M_u[static_cast<std::size_t>(l)];
        double gsum = 0.0, gsq = 0.0, gb = 0.0;
        for (int m : serving) {
            gsum += st.gamma_u(m, l);
            gsq += st.gamma_u(m, l) * st.gamma_u(m, l);
            gb += st.gamma_u(m, l) * st.beta_u(m, l);
        }
        double mui = 0.0;
        for (int m : serving)
            for (int qu = 0; qu < Ku; ++qu)
                if (qu != l) mui += st.gamma_u(m, l) * st.beta_u(m, qu) * pc.theta(qu);
        double ri = 0.0;  // undistorted loop power over (m, i, k)
        for (int m : serving)
            for (int i = 0; i < M; ++i)
                for (int kd : sets.kappa_d[static_cast<std::size_t>(i)])
                    ri += st.gamma_u(m, l) * st.gamma_d(i, kd) * st.beta_ri(m, i) * cfg.gamma_ri *
                          pc.eta(i, kd);
        tp.ul_ds(l) = a2 * Nr * Nr * rho_u * pc.theta(l) * gsum * gsum;
        tp.ul_bu(l) = a2 * Nr * rho_u * pc.theta(l) * gb;
        tp.ul_mui(l) = a2 * Nr * rho_u * mui;
        tp.ul_ri(l) = a2 * b * Nr * Nt * rho_d * ri;
        tp.ul_n(l) = a2 * Nr * gsum;
        // Distortion picks up every contribution to the quantizer input:
        // own signal (including the fourth-moment excess), other uplink UEs,
        // the loop channel and receiver noise.
        tp.ul_tqd(l) = dist * (Nr * rho_u * pc.theta(l) * (Nr * gsq + gb) + Nr * rho_u * mui +
                               b * Nr * Nt * rho_d * ri + Nr * gsum);
    }
    return tp;
}

/// Monte-Carlo estimates of the same term powers. Coherent amplitudes are
/// averaged first (desired signal), everything else is a mean of conditional
/// powers.
inline TermPowers mc_term_powers(const LargeScaleState& st, const ServingSets& sets,
                                 const QuantizerParams& q, const PowerControl& pc,
                                 const SystemConfig& cfg, int trials, std::uint64_t seed) {
    const int Kd = cfg.Kd, Ku = cfg.Ku;
    const double a2 = q.a_tilde * q.a_tilde;
    const double rho_d = cfg.rho_d(), rho_u = cfg.rho_u();

    using Acc = std::vector<std::vector<double>>;
    auto acc = [&](int n) {
        Acc v(static_cast<std::size_t>(n));
        for (auto& row : v) row.resize(static_cast<std::size_t>(trials));
        return v;
    };
    Acc dl_sig_re = acc(Kd), dl_sig_im = acc(Kd), dl_bu = acc(Kd), dl_mui = acc(Kd),
        dl_udi = acc(Kd), dl_tqd = acc(Kd);
    Acc ul_sig_re = acc(Ku), ul_sig_im = acc(Ku), ul_bu = acc(Ku), ul_mui = acc(Ku),
        ul_ri = acc(Ku), ul_n = acc(Ku), ul_tqd = acc(Ku);

    const EstimationMode mode = estimation_mode_of(cfg);
    for (int t = 0; t < trials; ++t) {
        Rng rng = substream(seed, "mc-term", static_cast<std::uint64_t>(t));
        const ChannelRealization cr = sample_realization(st, cfg, rng, mode);
        const auto tt = detail::trial_terms(cr, st, sets, q, pc, cfg);
        const auto ti = static_cast<std::size_t>(t);
        for (int k = 0; k < Kd; ++k) {
            const auto ki = static_cast<std::size_t>(k);
            dl_sig_re[ki][ti] = tt.dl_sig_amp[ki].real();
            dl_sig_im[ki][ti] = tt.dl_sig_amp[ki].imag();
            dl_bu[ki][ti] = a2 * rho_d * std::norm(tt.dl_bu_amp[ki]);
            dl_mui[ki][ti] = tt.dl_mui[ki];
            dl_udi[ki][ti] = tt.dl_udi[ki];
            dl_tqd[ki][ti] = tt.dl_tqd[ki];
        }
        for (int l = 0; l < Ku; ++l) {
            const auto li = static_cast<std::size_t>(l);
            ul_sig_re[li][ti] = tt.ul_sig_amp[li].real();
            ul_sig_im[li][ti] = tt.ul_sig_amp[li].imag();
            ul_bu[li][ti] = a2 * rho_u * pc.theta(l) * std::norm(tt.ul_bu_amp[li]);
            ul_mui[li][ti] = tt.ul_mui[li];
            ul_ri[li][ti] = tt.ul_ri[li];
            ul_n[li][ti] = tt.ul_n[li];
            ul_tqd[li][ti] = tt.ul_tqd[li];
        }
    }

    TermPowers tp;
    tp.dl_ds.resize(Kd);
    tp.dl_bu.resize(Kd);
    tp.dl_mui.resize(Kd);
    tp.dl_udi.resize(Kd);
    tp.dl_tqd.resize(Kd);
    tp.ul_ds.resize(Ku);
    tp.ul_bu.resize(Ku);
    tp.ul_mui.resize(Ku);
    tp.ul_ri.resize(Ku);
    tp.ul_n.resize(Ku);
    tp.ul_tqd.resize(Ku);
    for (int k = 0; k < Kd; ++k) {
        const auto ki = static_cast<std::size_t>(k);
        const std::complex<double> mean_amp(pairwise_mean(dl_sig_re[ki]), pairwise_mean(dl_sig_im[ki]));
        tp.dl_ds(k) = a2 * rho_d * std::norm(mean_amp);
        tp.dl_bu(k) = pairwise_mean(dl_bu[ki]);
        tp.dl_mui(k) = pairwise_mean(dl_mui[ki]);
        tp.dl_udi(k) = pairwise_mean(dl_udi[ki]);
        tp.dl_tqd(k) = pairwise_mean(dl_tqd[ki]);
    }
    for (int l = 0; l < Ku; ++l) {
        const auto li = static_cast<std::size_t>(l);
        const std::complex<double> mean_amp(pairwise_mean(ul_sig_re[li]), pairwise_mean(ul_sig_im[li]));
        tp.ul_ds(l) = a2 * rho_u * pc.theta(l) * std::norm(mean_amp);
        tp.ul_bu(l) = pairwise_mean(ul_bu[li]);
        tp.ul_mui(l) = pairwise_mean(ul_mui[li]);
        tp.ul_ri(l) = pairwise_mean(ul_ri[li]);
        tp.ul_n(l) = pairwise_mean(ul_n[li]);
        tp.ul_tqd(l) = pairwise_mean(ul_tqd[li]);
    }
    return tp;
}

}  // namespace fdcf

#endif
