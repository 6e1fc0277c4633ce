// SPDX-License-Identifier: Apache-2.0

#ifndef FDCF_EXPERIMENT_HPP
#define FDCF_EXPERIMENT_HPP

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "fdcf/admm.hpp"
#include "fdcf/mc_oracle.hpp"

namespace fdcf {

/// Everything derived from a SystemConfig and a master seed: deployment,
/// large-scale state, quantizer, serving sets and bound coefficients.
struct Scenario {
    SystemConfig cfg;
    Deployment dep;
    LargeScaleState ls;
    QuantizerParams qp;
    FronthaulCaps caps;
    ServingSets sets;
    SEBoundCoefficients coeffs;
};

inline Scenario build_scenario(const SystemConfig& cfg, std::uint64_t seed) {
    Scenario sc;
    sc.cfg = cfg;
    sc.cfg.validate();
    sc.dep = deploy(sc.cfg, seed);
    sc.ls = large_scale(sc.dep, sc.cfg, seed);
    sc.qp = optimize_step(sc.cfg.nu);
    sc.caps = fronthaul_caps(sc.cfg);
    sc.sets = select_aps(sc.ls, sc.caps, sc.cfg);
    sc.coeffs = se_coefficients(sc.ls, sc.sets, sc.qp, sc.cfg);
    return sc;
}

inline GcpContext scenario_context(const Scenario& sc) {
    return make_gcp_context(sc.coeffs, sc.sets, sc.ls, sc.qp, sc.cfg);
}

namespace csv {

inline std::string num(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

inline std::string provenance(const ExperimentSpec& spec) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "# config=%016llx seed=%llu\n",
                  static_cast<unsigned long long>(config_hash(spec)),
                  static_cast<unsigned long long>(spec.seed));
    return buf;
}

}  // namespace csv

// ---------------------------------------------------------------------------
// quantizer-table

inline std::string run_quantizer_table(const ExperimentSpec& spec) {
    std::string out = csv::provenance(spec);
    out += "nu,delta_opt,a_tilde,distortion\n";
    for (int nu = 1; nu <= 6; ++nu) {
        const QuantizerParams qp = optimize_step(nu);
        out += std::to_string(nu) + "," + csv::num(qp.delta) + "," + csv::num(qp.a_tilde) + "," +
               csv::num(qp.distortion()) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// topology-dump

inline std::string run_topology_dump(const ExperimentSpec& spec) {
    const Scenario sc = build_scenario(spec.scenario, spec.seed);
    std::string out = csv::provenance(spec);
    out += "ap_id,direction,ue_id,beta\n";
    for (int m = 0; m < sc.cfg.M; ++m) {
        for (int k : sc.sets.kappa_d[static_cast<std::size_t>(m)])
            out += std::to_string(m) + ",dl," + std::to_string(k) + "," +
                   csv::num(sc.ls.beta_d(m, k)) + "\n";
        for (int l : sc.sets.kappa_u[static_cast<std::size_t>(m)])
            out += std::to_string(m) + ",ul," + std::to_string(l) + "," +
                   csv::num(sc.ls.beta_u(m, l)) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// validate-bound

struct ValidateBoundResult {
    std::string csv_text;
    Eigen::VectorXd lb_d, lb_u;
    McSeResult mc;
};

inline ValidateBoundResult run_validate_bound(const ExperimentSpec& spec) {
    const Scenario sc = build_scenario(spec.scenario, spec.seed);
    const PowerControl pc =
        baseline_allocation(BaselineKind::EPA1, sc.ls, sc.sets, sc.qp, sc.cfg, spec.seed);
    ValidateBoundResult res;
    std::tie(res.lb_d, res.lb_u) = se_lb(sc.coeffs, pc);
    res.mc = mc_ergodic_se(sc.ls, sc.sets, sc.qp, pc, sc.cfg, spec.trials, spec.seed);
    std::string out = csv::provenance(spec);
    out += "ue_id,direction,lb,ub,stderr,gap\n";
    for (int k = 0; k < sc.cfg.Kd; ++k)
        out += std::to_string(k) + ",dl," + csv::num(res.lb_d(k)) + "," + csv::num(res.mc.ub_d(k)) +
               "," + csv::num(res.mc.stderr_d(k)) + "," + csv::num(res.mc.ub_d(k) - res.lb_d(k)) +
               "\n";
    for (int l = 0; l < sc.cfg.Ku; ++l)
        out += std::to_string(l) + ",ul," + csv::num(res.lb_u(l)) + "," + csv::num(res.mc.ub_u(l)) +
               "," + csv::num(res.mc.stderr_u(l)) + "," + csv::num(res.mc.ub_u(l) - res.lb_u(l)) +
               "\n";
    res.csv_text = std::move(out);
    return res;
}

// ---------------------------------------------------------------------------
// term-oracle

struct TermOracleResult {
    std::string csv_text;
    TermPowers closed, mc;
};

inline TermOracleResult run_term_oracle(const ExperimentSpec& spec) {
    const Scenario sc = build_scenario(spec.scenario, spec.seed);
    const PowerControl pc =
        baseline_allocation(BaselineKind::EPA1, sc.ls, sc.sets, sc.qp, sc.cfg, spec.seed);
    TermOracleResult res;
    res.closed = closed_term_powers(sc.ls, sc.sets, sc.qp, pc, sc.cfg);
    res.mc = mc_term_powers(sc.ls, sc.sets, sc.qp, pc, sc.cfg, spec.trials, spec.seed);

    std::string out = csv::provenance(spec);
    out += "ue_id,direction,term,closed_form,mc_mean,rel_err\n";
    auto row = [&out](int ue, const char* dir, const char* term, double cf, double mc_val) {
        const double rel = cf == 0.0 ? std::fabs(mc_val) : std::fabs(mc_val - cf) / std::fabs(cf);
        out += std::to_string(ue) + "," + dir + "," + term + "," + csv::num(cf) + "," +
               csv::num(mc_val) + "," + csv::num(rel) + "\n";
    };
    for (int k = 0; k < sc.cfg.Kd; ++k) {
        row(k, "dl", "DS", res.closed.dl_ds(k), res.mc.dl_ds(k));
        row(k, "dl", "BU", res.closed.dl_bu(k), res.mc.dl_bu(k));
        row(k, "dl", "MUI", res.closed.dl_mui(k), res.mc.dl_mui(k));
        row(k, "dl", "UDI", res.closed.dl_udi(k), res.mc.dl_udi(k));
        row(k, "dl", "TQD", res.closed.dl_tqd(k), res.mc.dl_tqd(k));
    }
    for (int l = 0; l < sc.cfg.Ku; ++l) {
        row(l, "ul", "DS", res.closed.ul_ds(l), res.mc.ul_ds(l));
        row(l, "ul", "BU", res.closed.ul_bu(l), res.mc.ul_bu(l));
        row(l, "ul", "MUI", res.closed.ul_mui(l), res.mc.ul_mui(l));
        row(l, "ul", "RI", res.closed.ul_ri(l), res.mc.ul_ri(l));
        row(l, "ul", "N", res.closed.ul_n(l), res.mc.ul_n(l));
        row(l, "ul", "TQD", res.closed.ul_tqd(l), res.mc.ul_tqd(l));
    }
    res.csv_text = std::move(out);
    return res;
}

// ---------------------------------------------------------------------------
// sweep-power

struct SweepPowerRow {
    double p_dbm = 0.0;
    double sum_se_dl = 0.0, sum_se_ul = 0.0;
    double wsee_epa1 = 0.0, wsee_epa2 = 0.0, wsee_rpa = 0.0;
    double wsee_opt = 0.0;  // 0 when optimization is disabled
};

struct SweepPowerResult {
    std::string csv_text;
    std::vector<SweepPowerRow> rows;
};

inline SweepPowerResult run_sweep_power(const ExperimentSpec& spec) {
    SweepPowerResult res;
    std::string out = csv::provenance(spec);
    out += "p_dbm,sum_se_dl,sum_se_ul,wsee_epa1,wsee_epa2,wsee_rpa,wsee_opt\n";
    for (double p_dbm : spec.p_dbm_grid) {
        SystemConfig cfg = spec.scenario;
        cfg.set_power_dbm(p_dbm);
        const Scenario sc = build_scenario(cfg, spec.seed);
        SweepPowerRow row;
        row.p_dbm = p_dbm;
        auto eval_baseline = [&](BaselineKind kind) {
            const PowerControl pc = baseline_allocation(kind, sc.ls, sc.sets, sc.qp, sc.cfg, spec.seed);
            return evaluate_wsee(pc, sc.coeffs, sc.sets, sc.ls, sc.cfg);
        };
        const EnergyReport epa1 = eval_baseline(BaselineKind::EPA1);
        row.sum_se_dl = epa1.se_d.sum();
        row.sum_se_ul = epa1.se_u.sum();
        row.wsee_epa1 = epa1.wsee;
        row.wsee_epa2 = eval_baseline(BaselineKind::EPA2).wsee;
        row.wsee_rpa = eval_baseline(BaselineKind::RPA).wsee;
        if (spec.optimize_in_sweeps) {
            const GcpContext ctx = scenario_context(sc);
            row.wsee_opt = run_centralized(ctx, {}, spec.seed).report.final_wsee;
        }
        out += csv::num(row.p_dbm) + "," + csv::num(row.sum_se_dl) + "," + csv::num(row.sum_se_ul) +
               "," + csv::num(row.wsee_epa1) + "," + csv::num(row.wsee_epa2) + "," +
               csv::num(row.wsee_rpa) + "," + csv::num(row.wsee_opt) + "\n";
        res.rows.push_back(row);
    }
    res.csv_text = std::move(out);
    return res;
}

// ---------------------------------------------------------------------------
// sweep-nu

struct SweepNuRow {
    double c_fh_bps = 0.0;
    int nu = 0;
    int cap_d = 0, cap_u = 0;
    double r_fh_max = 0.0;
    double sum_se = 0.0;
    double wsee = 0.0;
};

struct SweepNuResult {
    std::string csv_text;
    std::vector<SweepNuRow> rows;
};

inline SweepNuResult run_sweep_nu(const ExperimentSpec& spec) {
    SweepNuResult res;
    std::string out = csv::provenance(spec);
    out += "c_fh_bps,nu,cap_d,cap_u,r_fh_max,sum_se,wsee\n";
    for (double c_fh : spec.c_fh_grid_bps) {
        for (int nu : spec.nu_grid) {
            SystemConfig cfg = spec.scenario;
            cfg.C_fh_bps = c_fh;
            cfg.nu = nu;
            const Scenario sc = build_scenario(cfg, spec.seed);
            SweepNuRow row;
            row.c_fh_bps = c_fh;
            row.nu = nu;
            const auto [cd, cu] = max_served(cfg, 0);
            row.cap_d = cd;
            row.cap_u = cu;
            for (int m = 0; m < cfg.M; ++m)
                row.r_fh_max = std::max(
                    row.r_fh_max, fronthaul_rate(sc.sets.K_dm(m), sc.sets.K_um(m), cfg.nu, cfg));
            PowerControl pc;
            if (spec.optimize_in_sweeps) {
                const GcpContext ctx = scenario_context(sc);
                if (spec.mode == "admm")
                    pc = run_decentralized(ctx, {}, spec.seed).pc;
                else
                    pc = run_centralized(ctx, {}, spec.seed).pc;
            } else {
                pc = baseline_allocation(BaselineKind::EPA1, sc.ls, sc.sets, sc.qp, sc.cfg, spec.seed);
            }
            const EnergyReport rep = evaluate_wsee(pc, sc.coeffs, sc.sets, sc.ls, sc.cfg);
            row.sum_se = rep.se_d.sum() + rep.se_u.sum();
            row.wsee = rep.wsee;
            out += csv::num(row.c_fh_bps) + "," + std::to_string(row.nu) + "," +
                   std::to_string(row.cap_d) + "," + std::to_string(row.cap_u) + "," +
                   csv::num(row.r_fh_max) + "," + csv::num(row.sum_se) + "," +
                   csv::num(row.wsee) + "\n";
            res.rows.push_back(row);
        }
    }
    res.csv_text = std::move(out);
    return res;
}

// ---------------------------------------------------------------------------
// sweep-ri / compare-hd

struct CompareHdRow {
    double gamma_ri_db = 0.0;
    double fd_sum_se = 0.0;
    double hd_sum_se = 0.0;
};

struct CompareHdResult {
    std::string csv_text;
    std::vector<CompareHdRow> rows;
};

/// Full-duplex sum SE (equal-power allocation) against the half-duplex
/// equivalent at one RI suppression level.
inline CompareHdRow compare_hd_point(const SystemConfig& base, std::uint64_t seed,
                                     double gamma_ri_db) {
    SystemConfig cfg = base;
    cfg.gamma_ri = db_to_lin(gamma_ri_db);
    const Scenario sc = build_scenario(cfg, seed);
    const PowerControl pc_fd =
        baseline_allocation(BaselineKind::EPA1, sc.ls, sc.sets, sc.qp, sc.cfg, seed);
    const auto [se_d, se_u] = se_lb(sc.coeffs, pc_fd);

    const SystemConfig hd_cfg = hd_equivalent_config(sc.cfg);
    const PowerControl pc_hd =
        baseline_allocation(BaselineKind::EPA1, sc.ls, sc.sets, sc.qp, hd_cfg, seed);
    CompareHdRow row;
    row.gamma_ri_db = gamma_ri_db;
    row.fd_sum_se = se_d.sum() + se_u.sum();
    row.hd_sum_se = hd_equivalent_sum_se(sc.ls, sc.sets, sc.qp, pc_hd, sc.cfg);
    return row;
}

inline CompareHdResult run_sweep_ri(const ExperimentSpec& spec) {
    CompareHdResult res;
    std::string out = csv::provenance(spec);
    out += "gamma_ri_db,fd_sum_se,hd_sum_se\n";
    for (double g : spec.gamma_ri_db_grid) {
        const CompareHdRow row = compare_hd_point(spec.scenario, spec.seed, g);
        out += csv::num(row.gamma_ri_db) + "," + csv::num(row.fd_sum_se) + "," +
               csv::num(row.hd_sum_se) + "\n";
        res.rows.push_back(row);
    }
    res.csv_text = std::move(out);
    return res;
}

inline CompareHdResult run_compare_hd(const ExperimentSpec& spec) {
    CompareHdResult res;
    std::string out = csv::provenance(spec);
    out += "gamma_ri_db,fd_sum_se,hd_sum_se\n";
    const CompareHdRow row =
        compare_hd_point(spec.scenario, spec.seed, lin_to_db(spec.scenario.gamma_ri));
    out += csv::num(row.gamma_ri_db) + "," + csv::num(row.fd_sum_se) + "," +
           csv::num(row.hd_sum_se) + "\n";
    res.rows.push_back(row);
    res.csv_text = std::move(out);
    return res;
}

// ---------------------------------------------------------------------------
// optimize-wsee

struct OptimizeResult {
    std::string csv_iterations;
    std::string csv_summary;
    EnergyReport energy;
    SCAReport sca;
    AdmmReport admm;  // populated in admm mode
    bool used_admm = false;
    double avg_iteration_ms = 0.0;
};

inline OptimizeResult run_optimize(const ExperimentSpec& spec) {
    const Scenario sc = build_scenario(spec.scenario, spec.seed);
    const GcpContext ctx = scenario_context(sc);
    OptimizeResult res;
    res.used_admm = spec.mode == "admm";

    PowerControl pc;
    const auto t0 = std::chrono::steady_clock::now();
    if (res.used_admm) {
        AdmmResult ar = run_decentralized(ctx, {}, spec.seed);
        pc = ar.pc;
        res.admm = std::move(ar.report);
        res.sca = res.admm.sca;
        std::string out = csv::provenance(spec);
        out += "sca_iter,admm_iter,primal_res,dual_res,rho_c,rho_theta,wsee_estimate\n";
        for (const auto& it : res.admm.iterations)
            out += std::to_string(it.sca_iter) + "," + std::to_string(it.admm_iter) + "," +
                   csv::num(it.primal_res) + "," + csv::num(it.dual_res) + "," +
                   csv::num(it.rho_c) + "," + csv::num(it.rho_theta) + "," +
                   csv::num(it.wsee_estimate) + "\n";
        res.csv_iterations = std::move(out);
    } else {
        SCAResult sr = run_centralized(ctx, {}, spec.seed);
        pc = sr.pc;
        res.sca = std::move(sr.report);
        std::string out = csv::provenance(spec);
        out += "iter,wsee,residual,solver_status\n";
        for (const auto& it : res.sca.history) {
            const char* status = it.solver_status == SolveStatus::Optimal    ? "optimal"
                                 : it.solver_status == SolveStatus::MaxIter ? "max_iter"
                                                                            : "infeasible_start";
            out += std::to_string(it.iter) + "," + csv::num(it.wsee) + "," +
                   csv::num(it.residual) + "," + status + "\n";
        }
        res.csv_iterations = std::move(out);
    }
    const auto t1 = std::chrono::steady_clock::now();
    const double total_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    int iters = res.sca.iterations;
    if (res.used_admm)
        iters = std::max<int>(1, static_cast<int>(res.admm.iterations.size()));
    res.avg_iteration_ms = total_ms / std::max(1, iters);

    res.energy = evaluate_wsee(pc, sc.coeffs, sc.sets, sc.ls, sc.cfg);
    std::string sum = csv::provenance(spec);
    sum += "ue_id,direction,se,power_w,ee,weight\n";
    for (int k = 0; k < sc.cfg.Kd; ++k)
        sum += std::to_string(k) + ",dl," + csv::num(res.energy.se_d(k)) + "," +
               csv::num(res.energy.p_d(k)) + "," + csv::num(res.energy.ee_d(k)) + "," +
               csv::num(sc.cfg.weight_dl(k)) + "\n";
    for (int l = 0; l < sc.cfg.Ku; ++l)
        sum += std::to_string(l) + ",ul," + csv::num(res.energy.se_u(l)) + "," +
               csv::num(res.energy.p_u(l)) + "," + csv::num(res.energy.ee_u(l)) + "," +
               csv::num(sc.cfg.weight_ul(l)) + "\n";
    res.csv_summary = std::move(sum);
    return res;
}

}  // namespace fdcf

#endif
