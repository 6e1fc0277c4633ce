// SPDX-License-Identifier: Apache-2.0

#ifndef FDCF_FRONTHAUL_HPP
#define FDCF_FRONTHAUL_HPP

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "fdcf/topology.hpp"

namespace fdcf {

/// Per-AP served-UE caps implied by the fronthaul capacity.
struct FronthaulCaps {
    std::vector<int> cap_d;  // K_dm after clipping to Kd
    std::vector<int> cap_u;  // K_um after clipping to Ku
};

/// Maximum downlink/uplink UEs one AP may serve: the capacity budget split
/// proportionally between the two directions, floored, then clipped to the
/// UE counts. The denominator (4 by default, 2 as the laxer variant) is a
/// config switch.
inline std::pair<int, int> max_served(const SystemConfig& cfg, int /*m*/) {
    if (cfg.nu == 0) return {cfg.Kd, cfg.Ku};  // perfect fronthaul
    const double budget = cfg.C_fh_bps * cfg.Tc_s /
                          (cfg.fronthaul_cap_denominator * (cfg.tau_c - cfg.tau_t()) *
                           static_cast<double>(cfg.nu));
    const double K = cfg.K();
    const int cap_d = static_cast<int>(std::floor(cfg.Kd / K * budget));
    const int cap_u = static_cast<int>(std::floor(cfg.Ku / K * budget));
    return {std::min(cfg.Kd, cap_d), std::min(cfg.Ku, cap_u)};
}

inline FronthaulCaps fronthaul_caps(const SystemConfig& cfg) {
    FronthaulCaps caps;
    caps.cap_d.resize(static_cast<std::size_t>(cfg.M));
    caps.cap_u.resize(static_cast<std::size_t>(cfg.M));
    for (int m = 0; m < cfg.M; ++m) {
        const auto [cd, cu] = max_served(cfg, m);
        caps.cap_d[static_cast<std::size_t>(m)] = cd;
        caps.cap_u[static_cast<std::size_t>(m)] = cu;
    }
    return caps;
}

/// Bits per second one AP pushes over its fronthaul for the given served
/// counts: 2 nu (K_dm + K_um) payload words per data sample.
inline double fronthaul_rate(int K_dm, int K_um, int nu, const SystemConfig& cfg) {
    return 2.0 * nu * (K_dm + K_um) * (cfg.tau_c - cfg.tau_t()) / cfg.Tc_s;
}

/// User-centric serving sets. kappa_*[m] lists UEs served by AP m; M_*[ue]
/// lists the APs serving that UE. The two views stay mutually consistent.
struct ServingSets {
    std::vector<std::vector<int>> kappa_d, kappa_u;
    std::vector<std::vector<int>> M_d, M_u;

    int K_dm(int m) const { return static_cast<int>(kappa_d[static_cast<std::size_t>(m)].size()); }
    int K_um(int m) const { return static_cast<int>(kappa_u[static_cast<std::size_t>(m)].size()); }
    bool serves_dl(int m, int k) const {
        const auto& v = kappa_d[static_cast<std::size_t>(m)];
        return std::find(v.begin(), v.end(), k) != v.end();
    }
    bool serves_ul(int m, int l) const {
        const auto& v = kappa_u[static_cast<std::size_t>(m)];
        return std::find(v.begin(), v.end(), l) != v.end();
    }
};

namespace detail {

/// Indices of the n largest gains of `row`, strongest first; ties broken by
/// lower index for reproducibility.
inline std::vector<int> top_by_gain(const Eigen::VectorXd& row, int n) {
    std::vector<int> idx(static_cast<std::size_t>(row.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (row(a) != row(b)) return row(a) > row(b);
        return a < b;
    });
    idx.resize(static_cast<std::size_t>(std::min<int>(n, static_cast<int>(row.size()))));
    std::sort(idx.begin(), idx.end());
    return idx;
}

/// Repair pass for one direction: every orphan UE is attached to its
/// strongest AP by evicting that AP's weakest same-direction UE that keeps
/// at least one other serving AP. If the strongest AP has nothing evictable
/// the next-strongest is tried before giving up.
inline void repair_direction(const Eigen::MatrixXd& beta, std::vector<std::vector<int>>& kappa,
                             std::vector<std::vector<int>>& M_of, const char* label) {
    const int M = static_cast<int>(beta.rows());
    const int K = static_cast<int>(beta.cols());
    for (int ue = 0; ue < K; ++ue) {
        if (!M_of[static_cast<std::size_t>(ue)].empty()) continue;
        std::vector<int> ap_order(static_cast<std::size_t>(M));
        std::iota(ap_order.begin(), ap_order.end(), 0);
        std::sort(ap_order.begin(), ap_order.end(), [&](int a, int b) {
            if (beta(a, ue) != beta(b, ue)) return beta(a, ue) > beta(b, ue);
            return a < b;
        });
        bool attached = false;
        for (int ap : ap_order) {
            auto& served = kappa[static_cast<std::size_t>(ap)];
            // Weakest evictable UE at this AP; ties evict the lowest index.
            int evict = -1;
            for (int q : served) {
                if (static_cast<int>(M_of[static_cast<std::size_t>(q)].size()) < 2) continue;
                if (evict < 0 || beta(ap, q) < beta(ap, evict) ||
                    (beta(ap, q) == beta(ap, evict) && q < evict))
                    evict = q;
            }
            if (evict < 0) continue;
            served.erase(std::remove(served.begin(), served.end(), evict), served.end());
            auto& maps = M_of[static_cast<std::size_t>(evict)];
            maps.erase(std::remove(maps.begin(), maps.end(), ap), maps.end());
            served.push_back(ue);
            std::sort(served.begin(), served.end());
            M_of[static_cast<std::size_t>(ue)].push_back(ap);
            attached = true;
            break;
        }
        if (!attached)
            throw InfeasibleError(std::string("AP selection: no serving AP found for ") + label +
                                  " UE " + std::to_string(ue) +
                                  " (no evictable UE at any AP)");
    }
}

}  // namespace detail

/// Builds the serving sets: each AP keeps its strongest UEs up to its caps,
/// then orphans are repaired. Throws when the caps leave the network unable
/// to serve anyone or an orphan cannot be placed.
inline ServingSets select_aps(const LargeScaleState& st, const FronthaulCaps& caps,
                              const SystemConfig& cfg) {
    const int M = cfg.M;
    bool any_capacity = false;
    for (int m = 0; m < M; ++m)
        if (caps.cap_d[static_cast<std::size_t>(m)] > 0 || caps.cap_u[static_cast<std::size_t>(m)] > 0)
            any_capacity = true;
    if (!any_capacity)
        throw ConfigError("fronthaul caps are zero at every AP; the network cannot serve anyone");

    ServingSets sets;
    sets.kappa_d.resize(static_cast<std::size_t>(M));
    sets.kappa_u.resize(static_cast<std::size_t>(M));
    sets.M_d.resize(static_cast<std::size_t>(cfg.Kd));
    sets.M_u.resize(static_cast<std::size_t>(cfg.Ku));

    for (int m = 0; m < M; ++m) {
        sets.kappa_d[static_cast<std::size_t>(m)] =
            detail::top_by_gain(st.beta_d.row(m), caps.cap_d[static_cast<std::size_t>(m)]);
        sets.kappa_u[static_cast<std::size_t>(m)] =
            detail::top_by_gain(st.beta_u.row(m), caps.cap_u[static_cast<std::size_t>(m)]);
        for (int k : sets.kappa_d[static_cast<std::size_t>(m)]) sets.M_d[static_cast<std::size_t>(k)].push_back(m);
        for (int l : sets.kappa_u[static_cast<std::size_t>(m)]) sets.M_u[static_cast<std::size_t>(l)].push_back(m);
    }

    detail::repair_direction(st.beta_d, sets.kappa_d, sets.M_d, "downlink");
    detail::repair_direction(st.beta_u, sets.kappa_u, sets.M_u, "uplink");
    for (auto& v : sets.M_d) std::sort(v.begin(), v.end());
    for (auto& v : sets.M_u) std::sort(v.begin(), v.end());
    return sets;
}

}  // namespace fdcf

#endif
