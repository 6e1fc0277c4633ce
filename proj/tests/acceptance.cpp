// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the exit status is the number of failures.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "fdcf/experiment.hpp"

using namespace fdcf;

namespace {

int g_failures = 0;

void criterion(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("[criterion %2d] %s  %s  (%s)\n", id, ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

SystemConfig scaled_config(int M, int N, int Kd, int Ku) {
    SystemConfig cfg;
    cfg.M = M;
    cfg.Nt = cfg.Nr = N;
    cfg.Kd = Kd;
    cfg.Ku = Ku;
    cfg.tau_td = Kd;
    cfg.tau_tu = Ku;
    cfg.set_power_dbm(30.0);  // p_d = 2 p_u = 1 W
    return cfg;
}

// --------------------------------------------------------------------------

void criterion_1_quantizer_table() {
    struct Row {
        int nu;
        double delta, dist, a;
    };
    const Row table[] = {{1, 1.596, 0.2313, 0.6366},     {2, 0.9957, 0.10472, 0.88115},
                         {3, 0.586, 0.036037, 0.96256},  {4, 0.3352, 0.011409, 0.98845},
                         {5, 0.1881, 0.003482, 0.996505}, {6, 0.1041, 0.0010389, 0.99896}};
    bool ok = true;
    double worst = 0.0;
    for (const Row& row : table) {
        const QuantizerParams qp = optimize_step(row.nu);
        const double dd = std::fabs(qp.delta - row.delta);
        const double da = std::fabs(qp.a_tilde - row.a);
        const double dq = std::fabs(qp.distortion() - row.dist);
        worst = std::max({worst, dd, da, dq});
        if (dd > 5e-3 || da > 1e-3 || dq > 1e-3) ok = false;
    }
    criterion(1, "quantizer table nu=1..6", ok, fmt("worst abs dev %.2e", worst));
}

void criterion_2_term_oracle() {
    ExperimentSpec spec;
    spec.scenario = scaled_config(2, 2, 2, 2);
    spec.trials = 10000;
    spec.seed = 2024;
    const TermOracleResult res = run_term_oracle(spec);

    bool ok = true;
    double worst = 0.0;
    std::string worst_term = "-";
    auto check_dir = [&](const std::vector<std::pair<const char*, const Eigen::VectorXd*>>& cf,
                         const std::vector<const Eigen::VectorXd*>& mc) {
        double max_cf = 0.0;
        for (const auto& [name, v] : cf) max_cf = std::max(max_cf, v->cwiseAbs().maxCoeff());
        for (std::size_t t = 0; t < cf.size(); ++t) {
            const Eigen::VectorXd& ref = *cf[t].second;
            const Eigen::VectorXd& est = *mc[t];
            for (int u = 0; u < ref.size(); ++u) {
                const double tol = ref(u) < 0.01 * max_cf ? 0.10 : 0.05;
                const double rel = std::fabs(est(u) - ref(u)) / std::fabs(ref(u));
                if (rel > worst) {
                    worst = rel;
                    worst_term = fmt("%s ue%d", cf[t].first, u);
                }
                if (rel > tol) ok = false;
            }
        }
    };
    check_dir({{"dl/DS", &res.closed.dl_ds},
               {"dl/BU", &res.closed.dl_bu},
               {"dl/MUI", &res.closed.dl_mui},
               {"dl/UDI", &res.closed.dl_udi},
               {"dl/TQD", &res.closed.dl_tqd}},
              {&res.mc.dl_ds, &res.mc.dl_bu, &res.mc.dl_mui, &res.mc.dl_udi, &res.mc.dl_tqd});
    check_dir({{"ul/DS", &res.closed.ul_ds},
               {"ul/BU", &res.closed.ul_bu},
               {"ul/MUI", &res.closed.ul_mui},
               {"ul/RI", &res.closed.ul_ri},
               {"ul/N", &res.closed.ul_n},
               {"ul/TQD", &res.closed.ul_tqd}},
              {&res.mc.ul_ds, &res.mc.ul_bu, &res.mc.ul_mui, &res.mc.ul_ri, &res.mc.ul_n,
               &res.mc.ul_tqd});
    criterion(2, "interference term powers vs Monte Carlo", ok,
              fmt("worst rel err %.3f at %s, 10^4 trials", worst, worst_term.c_str()));
}

void criterion_3_bound_validity() {
    bool ok = true;
    std::string ratios;
    for (double p_dbm : {10.0, 20.0, 30.0}) {
        ExperimentSpec spec;
        spec.scenario = scaled_config(16, 4, 6, 4);
        spec.scenario.set_power_dbm(p_dbm);
        spec.trials = 200;
        spec.seed = 31;
        const ValidateBoundResult res = run_validate_bound(spec);
        for (int k = 0; k < res.lb_d.size(); ++k)
            if (res.lb_d(k) > res.mc.ub_d(k) + 3.0 * res.mc.stderr_d(k)) ok = false;
        for (int l = 0; l < res.lb_u.size(); ++l)
            if (res.lb_u(l) > res.mc.ub_u(l) + 3.0 * res.mc.stderr_u(l)) ok = false;
        const double ratio = (res.lb_d.sum() + res.lb_u.sum()) /
                             (res.mc.ub_d.sum() + res.mc.ub_u.sum());
        ratios += fmt("%s%.0fdBm:%.3f", ratios.empty() ? "" : " ", p_dbm, ratio);
    }
    criterion(3, "SE lower bound below ergodic estimate", ok,
              ("sum-LB/sum-UB " + ratios).c_str());
}

void criterion_4_fd_vs_hd() {
    SystemConfig base = scaled_config(16, 4, 6, 4);
    const CompareHdRow good = compare_hd_point(base, 31, -40.0);
    const CompareHdRow poor = compare_hd_point(base, 31, 0.0);
    const bool ok = good.fd_sum_se > good.hd_sum_se && poor.fd_sum_se < poor.hd_sum_se;
    criterion(4, "duplex gain appears only under good RI suppression", ok,
              fmt("-40dB FD %.2f vs HD %.2f; 0dB FD %.2f vs HD %.2f", good.fd_sum_se,
                  good.hd_sum_se, poor.fd_sum_se, poor.hd_sum_se));
}

SystemConfig optimizer_config() {
    SystemConfig cfg = scaled_config(10, 2, 2, 2);
    cfg.S_o_dl.assign(2, 0.1);
    cfg.S_o_ul.assign(2, 0.1);
    cfg.C_fh_bps = 1e7;
    return cfg;
}

void criterion_5_sca() {
    const SystemConfig cfg = optimizer_config();
    const Scenario sc = build_scenario(cfg, 500);
    const GcpContext ctx = scenario_context(sc);
    const SCAResult res = run_centralized(ctx, {}, 500);

    bool monotone = true;
    double prev = -1e300;
    for (const auto& it : res.report.history) {
        if (it.objective < prev - 1e-6) monotone = false;
        prev = it.objective;
    }
    const bool converged = res.report.converged && res.report.iterations <= 50 &&
                           res.report.history.back().residual <= 1e-3;
    const bool feasible = power_constraints_ok(res.pc, sc.ls, sc.sets, sc.qp, cfg, 1e-8);
    const auto [se_d, se_u] = se_lb(sc.coeffs, res.pc);
    bool qos = true;
    for (int k = 0; k < cfg.Kd; ++k)
        if (se_d(k) < cfg.qos_dl(k) - 1e-9) qos = false;
    for (int l = 0; l < cfg.Ku; ++l)
        if (se_u(l) < cfg.qos_ul(l) - 1e-9) qos = false;

    criterion(5, "centralized SCA monotone, convergent, feasible",
              monotone && converged && feasible && qos,
              fmt("%d iters, residual %.2e, monotone=%d, qos=%d", res.report.iterations,
                  res.report.history.back().residual, monotone ? 1 : 0, qos ? 1 : 0));
}

void criteria_6_7_admm_and_baselines() {
    const SystemConfig cfg = optimizer_config();
    bool match = true;
    bool dominance = true;
    int strict = 0;
    double worst_gap = 0.0;
    for (std::uint64_t seed : {500u, 501u, 502u, 503u, 504u}) {
        const Scenario sc = build_scenario(cfg, seed);
        const GcpContext ctx = scenario_context(sc);
        const SCAResult central = run_centralized(ctx, {}, seed);
        const AdmmResult dec = run_decentralized(ctx, {}, seed);
        const double gap =
            std::fabs(dec.report.sca.final_wsee - central.report.final_wsee) /
            central.report.final_wsee;
        worst_gap = std::max(worst_gap, gap);
        if (gap > 0.01) match = false;

        double best_baseline = 0.0;
        for (BaselineKind kind : {BaselineKind::EPA1, BaselineKind::EPA2, BaselineKind::RPA}) {
            const PowerControl pc = baseline_allocation(kind, sc.ls, sc.sets, sc.qp, cfg, seed);
            best_baseline =
                std::max(best_baseline, evaluate_wsee(pc, sc.coeffs, sc.sets, sc.ls, cfg).wsee);
        }
        if (central.report.final_wsee < best_baseline * (1.0 - 1e-9)) dominance = false;
        if (central.report.final_wsee > best_baseline * (1.0 + 1e-6)) ++strict;
    }
    criterion(6, "decentralized WSEE equals centralized within 1%", match,
              fmt("worst relative gap %.4f over 5 seeds", worst_gap));
    criterion(7, "optimized WSEE dominates EPA1/EPA2/RPA", dominance && strict >= 4,
              fmt("strictly better on %d/5 seeds", strict));
}

void criterion_8_fronthaul() {
    SystemConfig cfg;  // reference parameters: M=32, Kd=12, Ku=8, nu=2, C=10 Mbps
    const auto [cap_d, cap_u] = max_served(cfg, 0);
    bool ok = cap_d == 4 && cap_u == 2;
    std::string detail = fmt("caps (%d,%d)", cap_d, cap_u);
    for (std::uint64_t seed : {800u, 801u, 802u}) {
        const Scenario sc = build_scenario(cfg, seed);
        for (int m = 0; m < cfg.M; ++m)
            if (fronthaul_rate(sc.sets.K_dm(m), sc.sets.K_um(m), cfg.nu, cfg) >
                cfg.C_fh_bps + 1e-9)
                ok = false;
        for (int k = 0; k < cfg.Kd; ++k)
            if (sc.sets.M_d[static_cast<std::size_t>(k)].empty()) ok = false;
        for (int l = 0; l < cfg.Ku; ++l)
            if (sc.sets.M_u[static_cast<std::size_t>(l)].empty()) ok = false;
    }
    criterion(8, "fronthaul feasibility after AP selection", ok, detail);
}

void criterion_9_nu_sweep() {
    ExperimentSpec spec;
    spec.scenario = scaled_config(16, 2, 5, 5);
    spec.scenario.S_o_dl.assign(5, 0.1);
    spec.scenario.S_o_ul.assign(5, 0.1);
    spec.seed = 900;
    spec.nu_grid = {1, 2, 3, 4};
    spec.c_fh_grid_bps = {1e7, 1e8};
    const SweepNuResult res = run_sweep_nu(spec);

    auto rows_for = [&](double c_fh) {
        std::vector<SweepNuRow> rows;
        for (const auto& r : res.rows)
            if (r.c_fh_bps == c_fh) rows.push_back(r);
        return rows;
    };
    auto argmax_nu = [](const std::vector<SweepNuRow>& rows) {
        int best = rows.front().nu;
        double best_w = rows.front().wsee;
        for (const auto& r : rows)
            if (r.wsee > best_w) {
                best_w = r.wsee;
                best = r.nu;
            }
        return best;
    };

    const auto limited = rows_for(1e7);
    const auto roomy = rows_for(1e8);
    const int best_limited = argmax_nu(limited);
    const int best_roomy = argmax_nu(roomy);
    bool rising = true;
    for (std::size_t i = 1; i < limited.size(); ++i) {
        if (limited[i].wsee < limited[i - 1].wsee) rising = false;
        if (limited[i].sum_se < limited[i - 1].sum_se) rising = false;
    }
    const bool ok = (best_limited == 3 || best_limited == 4) &&
                    (best_roomy == 1 || best_roomy == 2) && rising;
    criterion(9, "quantization-bit sweep reverses with fronthaul capacity", ok,
              fmt("best nu: %d @10Mbps (rising=%d), %d @100Mbps", best_limited, rising ? 1 : 0,
                  best_roomy));
}

void criterion_10_weights() {
    SystemConfig cfg = scaled_config(32, 2, 2, 2);
    cfg.S_o_dl.assign(2, 0.1);
    cfg.S_o_ul.assign(2, 0.1);
    cfg.C_fh_bps = 1e7;
    const std::uint64_t seed = 1000;

    SystemConfig equal = cfg;
    equal.w_d = {0.25, 0.25};
    equal.w_u = {0.25, 0.25};
    const Scenario sc_eq = build_scenario(equal, seed);
    const GcpContext ctx_eq = scenario_context(sc_eq);
    const SCAResult run_eq = run_centralized(ctx_eq, {}, seed);
    const EnergyReport rep_eq = evaluate_wsee(run_eq.pc, sc_eq.coeffs, sc_eq.sets, sc_eq.ls, equal);

    // best-channel downlink UE by aggregate estimate quality
    double g0 = 0.0, g1 = 0.0;
    for (int m = 0; m < cfg.M; ++m) {
        g0 += sc_eq.ls.gamma_d(m, 0);
        g1 += sc_eq.ls.gamma_d(m, 1);
    }
    const int best_dl = g0 >= g1 ? 0 : 1;

    SystemConfig shifted = cfg;
    shifted.w_d.assign(2, 0.0);
    shifted.w_d[static_cast<std::size_t>(best_dl)] = 0.02;
    shifted.w_d[static_cast<std::size_t>(1 - best_dl)] = 0.08;
    shifted.w_u = {0.5, 0.4};
    const Scenario sc_sh = build_scenario(shifted, seed);
    const GcpContext ctx_sh = scenario_context(sc_sh);
    const SCAResult run_sh = run_centralized(ctx_sh, {}, seed);
    const EnergyReport rep_sh =
        evaluate_wsee(run_sh.pc, sc_sh.coeffs, sc_sh.sets, sc_sh.ls, shifted);

    const bool ok = rep_sh.ee_u(0) > rep_eq.ee_u(0) && rep_sh.ee_u(1) > rep_eq.ee_u(1);
    criterion(10, "uplink EEs rise when weights shift their way", ok,
              fmt("ul EE (Mbit/J) %.3f/%.3f -> %.3f/%.3f", rep_eq.ee_u(0) / 1e6,
                  rep_eq.ee_u(1) / 1e6, rep_sh.ee_u(0) / 1e6, rep_sh.ee_u(1) / 1e6));
}

template <typename F>
void timed(const char* label, F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    std::fprintf(stderr, "  (%s: %.1f s)\n", label,
                 std::chrono::duration<double>(t1 - t0).count());
}

}  // namespace

int main() {
    timed("c1", [] { criterion_1_quantizer_table(); });
    timed("c2", [] { criterion_2_term_oracle(); });
    timed("c3", [] { criterion_3_bound_validity(); });
    timed("c4", [] { criterion_4_fd_vs_hd(); });
    timed("c5", [] { criterion_5_sca(); });
    timed("c6+7", [] { criteria_6_7_admm_and_baselines(); });
    timed("c8", [] { criterion_8_fronthaul(); });
    timed("c9", [] { criterion_9_nu_sweep(); });
    timed("c10", [] { criterion_10_weights(); });
    if (g_failures == 0)
        std::printf("acceptance: all criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
    return g_failures;
}
