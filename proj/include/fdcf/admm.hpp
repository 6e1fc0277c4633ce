// SPDX-License-Identifier: Apache-2.0

#ifndef FDCF_ADMM_HPP
#define FDCF_ADMM_HPP

#include <future>
#include <vector>

#include "fdcf/sca.hpp"

namespace fdcf {

/// Per-UE worker state: full local copies of both power-control blocks,
/// this UE's epigraph slacks, and the consensus duals.
struct LocalState {
    bool is_downlink = true;
    int ue = 0;
    Eigen::MatrixXd c_local;      // M x Kd
    Eigen::VectorXd theta_local;  // Ku
    double f = 0.0, psi = 0.0, zeta = 0.0, lambda = 0.0;
    Eigen::MatrixXd chi;  // duals on the c consensus constraint
    Eigen::VectorXd xi;   // duals on the theta consensus constraint
    bool solver_flag = false;
};

/// Aggregator state: consensus variables, penalties and residual norms.
struct GlobalState {
    Eigen::MatrixXd c_global;
    Eigen::VectorXd theta_global;
    double rho_c = 0.1;
    double rho_theta = 0.1;
    double primal_res = 0.0;
    double dual_res = 0.0;
};

/// chi += rho_c (C_local - C_global); xi += rho_theta (theta gap). Uses the
/// global values of the current iteration (before aggregation).
inline void dual_update(LocalState& local, const GlobalState& global) {
    local.chi += global.rho_c * (local.c_local - global.c_global);
    local.xi += global.rho_theta * (local.theta_local - global.theta_global);
}

/// Closed-form aggregation: averages local copies shifted by their scaled
/// duals.
inline GlobalState global_update(const std::vector<LocalState>& locals, const GlobalState& prev) {
    GlobalState g = prev;
    g.c_global.setZero();
    g.theta_global.setZero();
    for (const auto& ls : locals) {
        g.c_global += ls.c_local + ls.chi / prev.rho_c;
        g.theta_global += ls.theta_local + ls.xi / prev.rho_theta;
    }
    const double K = static_cast<double>(locals.size());
    g.c_global /= K;
    g.theta_global /= K;
    return g;
}

/// Primal and dual residual norms of one ADMM iteration.
inline std::pair<double, double> residuals(const std::vector<LocalState>& locals,
                                           const GlobalState& now, const GlobalState& prev) {
    double r2 = 0.0;
    for (const auto& ls : locals) {
        r2 += (ls.c_local - now.c_global).squaredNorm();
        r2 += (ls.theta_local - now.theta_global).squaredNorm();
    }
    const double K = static_cast<double>(locals.size());
    const double s2 = K * ((now.c_global - prev.c_global).squaredNorm() +
                           (now.theta_global - prev.theta_global).squaredNorm());
    return {std::sqrt(r2), std::sqrt(s2)};
}

/// Residual-balancing penalty adaptation; one rule drives both penalties.
inline double penalty_update(double rho, double primal, double dual, double mu, double vartheta) {
    if (primal > mu * dual) return rho * vartheta;
    if (dual > mu * primal) return rho / vartheta;
    return rho;
}

struct AdmmIterationRecord {
    int sca_iter = 0;
    int admm_iter = 0;
    double primal_res = 0.0;
    double dual_res = 0.0;
    double rho_c = 0.0;
    double rho_theta = 0.0;
    double wsee_estimate = 0.0;  // exact WSEE at the projected global point
};

struct AdmmOptions {
    SCAOptions sca{};
    double eps_admm = 0.01;
    int max_admm_iterations = 500;
    double mu = 10.0;
    double vartheta = 1.2;
    double rho0 = 0.1;
    SolveOptions local_solver{1e-7, 1.0, 10.0, 400, 1e-10, false};
};

struct AdmmReport {
    std::vector<AdmmIterationRecord> iterations;
    SCAReport sca;
    bool hit_admm_cap = false;
    double qos_max_violation = 0.0;
};

namespace detail {

/// One D-server: the local program is assembled once per SCA iteration
/// (constraints depend only on the linearization point); each ADMM pass
/// refreshes the penalty anchors and re-solves from the previous solution.
class LocalSolver {
   public:
    LocalSolver(bool is_downlink, int ue, const GcpContext& ctx, const SCAIterate& at)
        : ctx_(ctx) {
        const SystemConfig& cfg = *ctx.config;
        lay_ = make_layout(*ctx.sets, cfg, is_downlink ? ue : -1, is_downlink ? -1 : ue);
        prog_.init(lay_.n);
        emit_ap_power(prog_, lay_, *ctx.state, *ctx.sets, *ctx.quant, cfg);
        if (is_downlink)
            emit_dl_family(prog_, lay_, *ctx.coeffs, at, *ctx.sets, *ctx.state, *ctx.quant, cfg,
                           ctx.p_fix, ue);
        else
            emit_ul_family(prog_, lay_, *ctx.coeffs, at, *ctx.sets, cfg, ctx.p_fix, ue);
        set_primal_boxes(prog_, lay_, cfg);
        f_var_ = is_downlink ? lay_.f_d(ue) : lay_.f_u(ue);
        weight_ = is_downlink ? cfg.weight_dl(ue) : cfg.weight_ul(ue);
    }

    /// Maximize w f - <chi, C - Cg> - <xi, th - thg> - rho/2 ||...||^2 over
    /// the UE's feasible set; unserved local entries are separable and
    /// solved in closed form.
    void update(LocalState& ls, const GlobalState& g, const SolveOptions& solver_opts,
                double shrink) const {
        const SystemConfig& cfg = *ctx_.config;
        prog_.linear.setZero();
        prog_.linear(f_var_) = weight_;
        for (int m = 0; m < cfg.M; ++m)
            for (int k = 0; k < cfg.Kd; ++k)
                if (lay_.c(m, k) >= 0) {
                    prog_.penalty(lay_.c(m, k)) = g.rho_c;
                    prog_.anchor(lay_.c(m, k)) = g.c_global(m, k) - ls.chi(m, k) / g.rho_c;
                }
        for (int l = 0; l < cfg.Ku; ++l) {
            prog_.penalty(lay_.theta(l)) = g.rho_theta;
            prog_.anchor(lay_.theta(l)) = g.theta_global(l) - ls.xi(l) / g.rho_theta;
        }

        Eigen::VectorXd x0 = pack_local(ls);
        SolveReport sol;
        bool solved = false;
        for (int attempt = 0; attempt < 2 && !solved; ++attempt) {
            try {
                const Eigen::VectorXd xs = strict_interior(prog_, x0, shrink);
                sol = solve(prog_, xs, solver_opts);
                solved = sol.status != SolveStatus::InfeasibleStart;
            } catch (const InfeasibleError&) {
                solved = false;
            }
            if (!solved && attempt == 0) {
                // Retry from the consensus point with slacks rebuilt.
                LocalState fresh = ls;
                fresh.c_local = g.c_global.cwiseMax(0.0);
                fresh.theta_local = g.theta_global.cwiseMax(0.0).cwiseMin(1.0);
                recompute_slacks_of(fresh);
                x0 = pack_local(fresh);
            }
        }
        if (!solved) {
            ls.solver_flag = true;  // retain the previous local state
            return;
        }
        unpack_local(sol.x_star, ls);
        // Unserved copies: argmax of the separable penalty under c >= 0.
        for (int m = 0; m < cfg.M; ++m)
            for (int k = 0; k < cfg.Kd; ++k)
                if (lay_.c(m, k) < 0)
                    ls.c_local(m, k) =
                        std::max(0.0, g.c_global(m, k) - ls.chi(m, k) / g.rho_c);
    }

    void recompute_slacks_of(LocalState& ls) const {
        const SEBoundCoefficients& co = *ctx_.coeffs;
        const SystemConfig& cfg = *ctx_.config;
        PowerControl pc{ls.c_local.cwiseProduct(ls.c_local), ls.theta_local};
        const auto [p_d, p_u] = consumed_power(pc, *ctx_.sets, *ctx_.state, cfg);
        if (ls.is_downlink) {
            const int k = ls.ue;
            double num = 0.0;
            for (int m : ctx_.sets->M_d[static_cast<std::size_t>(k)])
                num += co.A_d(m, k) * ls.c_local(m, k);
            ls.lambda = num;
            ls.zeta = num * num / dl_denominator(co, pc, k);
            ls.psi = std::sqrt(co.tau_f * std::log2(1.0 + ls.zeta));
            ls.f = ls.psi * ls.psi / p_d(k);
        } else {
            const int l = ls.ue;
            ls.lambda = std::sqrt(co.A_u(l) * ls.theta_local(l));
            ls.zeta = co.A_u(l) * ls.theta_local(l) / ul_denominator(co, pc, l);
            ls.psi = std::sqrt(co.tau_f * std::log2(1.0 + ls.zeta));
            ls.f = ls.psi * ls.psi / p_u(l);
        }
    }

   private:
    Eigen::VectorXd pack_local(const LocalState& ls) const {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(lay_.n);
        const SystemConfig& cfg = *ctx_.config;
        for (int m = 0; m < cfg.M; ++m)
            for (int k = 0; k < cfg.Kd; ++k)
                if (lay_.c(m, k) >= 0) x(lay_.c(m, k)) = ls.c_local(m, k);
        for (int l = 0; l < cfg.Ku; ++l) x(lay_.theta(l)) = ls.theta_local(l);
        const int ue = ls.ue;
        if (ls.is_downlink) {
            x(lay_.f_d(ue)) = ls.f;
            x(lay_.psi_d(ue)) = ls.psi;
            x(lay_.zeta_d(ue)) = ls.zeta;
            x(lay_.lambda_d(ue)) = ls.lambda;
        } else {
            x(lay_.f_u(ue)) = ls.f;
            x(lay_.psi_u(ue)) = ls.psi;
            x(lay_.zeta_u(ue)) = ls.zeta;
            x(lay_.lambda_u(ue)) = ls.lambda;
        }
        return x;
    }

    void unpack_local(const Eigen::VectorXd& x, LocalState& ls) const {
        const SystemConfig& cfg = *ctx_.config;
        for (int m = 0; m < cfg.M; ++m)
            for (int k = 0; k < cfg.Kd; ++k)
                if (lay_.c(m, k) >= 0) ls.c_local(m, k) = x(lay_.c(m, k));
        for (int l = 0; l < cfg.Ku; ++l) ls.theta_local(l) = x(lay_.theta(l));
        const int ue = ls.ue;
        if (ls.is_downlink) {
            ls.f = x(lay_.f_d(ue));
            ls.psi = x(lay_.psi_d(ue));
            ls.zeta = x(lay_.zeta_d(ue));
            ls.lambda = x(lay_.lambda_d(ue));
        } else {
            ls.f = x(lay_.f_u(ue));
            ls.psi = x(lay_.psi_u(ue));
            ls.zeta = x(lay_.zeta_u(ue));
            ls.lambda = x(lay_.lambda_u(ue));
        }
    }

    const GcpContext& ctx_;
    VarLayout lay_;
    mutable ConvexProgram prog_;
    int f_var_ = -1;
    double weight_ = 0.0;
};

/// Projects a consensus point onto the exact power constraints: clamp the
/// boxes, zero off-set entries, and rescale any AP column group that
/// overshoots its transmit budget.
inline void project_power_point(Eigen::MatrixXd& c, Eigen::VectorXd& theta, const GcpContext& ctx) {
    const SystemConfig& cfg = *ctx.config;
    theta = theta.cwiseMax(0.0).cwiseMin(1.0);
    c = c.cwiseMax(0.0);
    for (int m = 0; m < cfg.M; ++m) {
        double used = 0.0;
        for (int k = 0; k < cfg.Kd; ++k) {
            if (!ctx.sets->serves_dl(m, k)) {
                c(m, k) = 0.0;
                continue;
            }
            used += ctx.state->gamma_d(m, k) * c(m, k) * c(m, k);
        }
        const double budget = 1.0 / (cfg.Nt * ctx.quant->b_tilde);
        if (used > budget && used > 0.0) {
            const double scale = std::sqrt(budget / used);
            for (int k : ctx.sets->kappa_d[static_cast<std::size_t>(m)]) c(m, k) *= scale;
        }
    }
}

}  // namespace detail

struct AdmmResult {
    PowerControl pc;
    AdmmReport report;
};

/// Decentralized WSEE maximization: the outer SCA loop of run_centralized
/// with each convexified program solved by consensus ADMM across one
/// D-server per UE. Local solves run concurrently; aggregation order is
/// fixed, so the run is deterministic.
inline AdmmResult run_decentralized(const GcpContext& ctx, const AdmmOptions& opts = {},
                                    std::uint64_t seed = 0) {
    const SystemConfig& cfg = *ctx.config;
    const int K = cfg.K();
    SCAIterate at = init_iterate(ctx, seed);
    AdmmReport rep;
    const double B = cfg.B_hz;
    double wsee =
        evaluate_wsee(at.power_control(), *ctx.coeffs, *ctx.sets, *ctx.state, *ctx.config).wsee;
    double prev_obj = wsee / B;

    for (int n = 1; n <= opts.sca.max_iterations; ++n) {
        // D-servers for this SCA iteration: programs anchored at `at`.
        std::vector<detail::LocalSolver> solvers;
        std::vector<LocalState> locals;
        solvers.reserve(static_cast<std::size_t>(K));
        locals.reserve(static_cast<std::size_t>(K));
        for (int k = 0; k < cfg.Kd; ++k) {
            solvers.emplace_back(true, k, ctx, at);
            LocalState ls;
            ls.is_downlink = true;
            ls.ue = k;
            ls.c_local = at.c;
            ls.theta_local = at.theta;
            ls.f = at.f_d(k);
            ls.psi = at.psi_d(k);
            ls.zeta = at.zeta_d(k);
            ls.lambda = at.lambda_d(k);
            ls.chi = Eigen::MatrixXd::Zero(cfg.M, cfg.Kd);
            ls.xi = Eigen::VectorXd::Zero(cfg.Ku);
            locals.push_back(std::move(ls));
        }
        for (int l = 0; l < cfg.Ku; ++l) {
            solvers.emplace_back(false, l, ctx, at);
            LocalState ls;
            ls.is_downlink = false;
            ls.ue = l;
            ls.c_local = at.c;
            ls.theta_local = at.theta;
            ls.f = at.f_u(l);
            ls.psi = at.psi_u(l);
            ls.zeta = at.zeta_u(l);
            ls.lambda = at.lambda_u(l);
            ls.chi = Eigen::MatrixXd::Zero(cfg.M, cfg.Kd);
            ls.xi = Eigen::VectorXd::Zero(cfg.Ku);
            locals.push_back(std::move(ls));
        }

        GlobalState global;
        global.c_global = at.c;
        global.theta_global = at.theta;
        global.rho_c = opts.rho0;
        global.rho_theta = opts.rho0;

        bool converged_admm = false;
        for (int p = 1; p <= opts.max_admm_iterations; ++p) {
            {  // local updates in parallel, joined before aggregation
                std::vector<std::future<void>> jobs;
                jobs.reserve(locals.size());
                for (std::size_t i = 0; i < locals.size(); ++i)
                    jobs.push_back(std::async(std::launch::async, [&, i] {
                        solvers[i].update(locals[i], global, opts.local_solver, opts.sca.shrink);
                    }));
                for (auto& j : jobs) j.get();
            }
            for (auto& ls : locals) dual_update(ls, global);
            const GlobalState prev = global;
            global = global_update(locals, prev);
            const auto [r, s] = residuals(locals, global, prev);
            global.primal_res = r;
            global.dual_res = s;

            Eigen::MatrixXd c_proj = global.c_global;
            Eigen::VectorXd th_proj = global.theta_global;
            detail::project_power_point(c_proj, th_proj, ctx);
            const PowerControl pc_est{c_proj.cwiseProduct(c_proj), th_proj};
            const double est =
                evaluate_wsee(pc_est, *ctx.coeffs, *ctx.sets, *ctx.state, cfg).wsee;
            rep.iterations.push_back({n, p, r, s, global.rho_c, global.rho_theta, est});

            const double rho_next_c = penalty_update(global.rho_c, r, s, opts.mu, opts.vartheta);
            const double rho_next_t =
                penalty_update(global.rho_theta, r, s, opts.mu, opts.vartheta);
            global.rho_c = rho_next_c;
            global.rho_theta = rho_next_t;
            if (r <= opts.eps_admm) {
                converged_admm = true;
                break;
            }
        }
        if (!converged_admm) rep.hit_admm_cap = true;

        SCAIterate next = at;
        next.c = global.c_global;
        next.theta = global.theta_global;
        detail::project_power_point(next.c, next.theta, ctx);
        recompute_slacks(next, ctx);

        const double residual = std::sqrt((next.c - at.c).squaredNorm() +
                                          (next.theta - at.theta).squaredNorm());
        wsee = evaluate_wsee(next.power_control(), *ctx.coeffs, *ctx.sets, *ctx.state, cfg).wsee;
        if (wsee / B < prev_obj - 1e-6) rep.sca.monotone = false;
        prev_obj = wsee / B;
        rep.sca.history.push_back({n, wsee, wsee / B, residual, SolveStatus::Optimal});
        at = next;
        if (residual <= opts.sca.eps_sca) {
            rep.sca.converged = true;
            break;
        }
    }
    rep.sca.iterations = static_cast<int>(rep.sca.history.size());
    rep.sca.final_wsee = wsee;

    // Exact-constraint QoS re-verification at the consensus point.
    const PowerControl pc = at.power_control();
    const auto [se_d, se_u] = se_lb(*ctx.coeffs, pc);
    for (int k = 0; k < cfg.Kd; ++k)
        rep.qos_max_violation = std::max(rep.qos_max_violation, cfg.qos_dl(k) - se_d(k));
    for (int l = 0; l < cfg.Ku; ++l)
        rep.qos_max_violation = std::max(rep.qos_max_violation, cfg.qos_ul(l) - se_u(l));
    if (rep.qos_max_violation > 1e-3)
        throw InfeasibleError("decentralized consensus point violates a QoS floor by " +
                              std::to_string(rep.qos_max_violation) + " bit/s/Hz");
    return {pc, std::move(rep)};
}

}  // namespace fdcf

#endif
