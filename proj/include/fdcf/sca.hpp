// SPDX-License-Identifier: Apache-2.0

#ifndef FDCF_SCA_HPP
#define FDCF_SCA_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fdcf/convex.hpp"
#include "fdcf/power_model.hpp"

namespace fdcf {

/// First-order Taylor under-estimator of f1^2 / f2 around (f1_n, f2_n):
///   Lambda(f1, f2) = 2 (f1_n/f2_n) f1 - (f1_n/f2_n)^2 f2.
/// Tangent at the expansion point, below the quotient everywhere (f2 > 0).
struct TaylorForm {
    double coeff_f1 = 0.0;  // 2 r
    double coeff_f2 = 0.0;  // -r^2

    double eval(double f1, double f2) const { return coeff_f1 * f1 + coeff_f2 * f2; }
};

inline TaylorForm taylor_under(double f1_n, double f2_n) {
    if (!(f2_n > 0.0)) throw SolverError("taylor_under: expansion denominator must be > 0");
    const double r = f1_n / f2_n;
    return {2.0 * r, -r * r};
}

inline double taylor_under(double f1, double f2, double f1_n, double f2_n) {
    return taylor_under(f1_n, f2_n).eval(f1, f2);
}

/// One SCA iterate: power-control amplitudes plus the epigraph slacks.
struct SCAIterate {
    Eigen::MatrixXd c;      // M x Kd, zero off the serving set
    Eigen::VectorXd theta;  // Ku
    Eigen::VectorXd f_d, psi_d, zeta_d, lambda_d;  // Kd
    Eigen::VectorXd f_u, psi_u, zeta_u, lambda_u;  // Ku

    PowerControl power_control() const { return {c.cwiseProduct(c), theta}; }
};

/// Variable indexing for a GCP over (c, theta, slacks). Central programs
/// carry every UE's slacks; the per-UE ADMM subproblems carry one UE's.
struct VarLayout {
    Eigen::MatrixXi c;  // -1 for pairs outside the serving sets
    Eigen::VectorXi theta;
    Eigen::VectorXi f_d, psi_d, zeta_d, lambda_d;
    Eigen::VectorXi f_u, psi_u, zeta_u, lambda_u;
    int n = 0;
};

namespace detail {

inline VarLayout make_layout(const ServingSets& sets, const SystemConfig& cfg, int only_dl_ue,
                             int only_ul_ue) {
    VarLayout lay;
    lay.c = Eigen::MatrixXi::Constant(cfg.M, cfg.Kd, -1);
    lay.theta = Eigen::VectorXi::Constant(cfg.Ku, -1);
    auto slack_vec = [&](int n) { return Eigen::VectorXi::Constant(n, -1); };
    lay.f_d = slack_vec(cfg.Kd);
    lay.psi_d = slack_vec(cfg.Kd);
    lay.zeta_d = slack_vec(cfg.Kd);
    lay.lambda_d = slack_vec(cfg.Kd);
    lay.f_u = slack_vec(cfg.Ku);
    lay.psi_u = slack_vec(cfg.Ku);
    lay.zeta_u = slack_vec(cfg.Ku);
    lay.lambda_u = slack_vec(cfg.Ku);

    int n = 0;
    for (int m = 0; m < cfg.M; ++m)
        for (int k : sets.kappa_d[static_cast<std::size_t>(m)]) lay.c(m, k) = n++;
    for (int l = 0; l < cfg.Ku; ++l) lay.theta(l) = n++;
    for (int k = 0; k < cfg.Kd; ++k) {
        if (only_dl_ue >= 0 && k != only_dl_ue) continue;
        if (only_ul_ue >= 0) continue;
        lay.f_d(k) = n++;
        lay.psi_d(k) = n++;
        lay.zeta_d(k) = n++;
        lay.lambda_d(k) = n++;
    }
    for (int l = 0; l < cfg.Ku; ++l) {
        if (only_ul_ue >= 0 && l != only_ul_ue) continue;
        if (only_dl_ue >= 0) continue;
        lay.f_u(l) = n++;
        lay.psi_u(l) = n++;
        lay.zeta_u(l) = n++;
        lay.lambda_u(l) = n++;
    }
    lay.n = n;
    return lay;
}

/// Emits the per-AP transmit-power constraints and their pull steps.
inline void emit_ap_power(ConvexProgram& prog, const VarLayout& lay, const LargeScaleState& st,
                          const ServingSets& sets, const QuantizerParams& q,
                          const SystemConfig& cfg) {
    for (int m = 0; m < cfg.M; ++m) {
        const auto& served = sets.kappa_d[static_cast<std::size_t>(m)];
        if (served.empty()) continue;
        Constraint con;
        con.kind = Constraint::Kind::QuadLeAffine;
        con.rhs = 1.0 / cfg.Nt;
        con.name = "ap_power[m=" + std::to_string(m) + "]";
        ConvexProgram::PullStep step;
        step.constraint = static_cast<int>(prog.constraints.size());
        for (int k : served) {
            con.quad.emplace_back(lay.c(m, k), q.b_tilde * st.gamma_d(m, k));
            step.vars.push_back(lay.c(m, k));
        }
        prog.constraints.push_back(std::move(con));
        prog.pull_chain.push_back(std::move(step));
    }
}

/// Emits one downlink UE's constraint family (SINR denominator, numerator
/// slack, SE-log link, power epigraph) with the pull steps ordered
/// lambda -> zeta -> psi -> f.
inline void emit_dl_family(ConvexProgram& prog, const VarLayout& lay,
                           const SEBoundCoefficients& co, const SCAIterate& at,
                           const ServingSets& sets, const LargeScaleState& st,
                           const QuantizerParams& /*q*/, const SystemConfig& cfg, double p_fix,
                           int k) {
    const std::string tag = "[k=" + std::to_string(k) + "]";
    if (!(at.zeta_d(k) > 0.0))
        throw SolverError("degenerate linearization: zeta_d" + tag + " <= 0");
    if (!(at.f_d(k) > 0.0)) throw SolverError("degenerate linearization: f_d" + tag + " <= 0");

    {  // lambda_k <= sum_m A_d(m,k) c_mk
        Constraint con;
        con.kind = Constraint::Kind::Affine;
        con.rhs = 0.0;
        con.name = "dl_numerator" + tag;
        con.lin.emplace_back(lay.lambda_d(k), 1.0);
        for (int m : sets.M_d[static_cast<std::size_t>(k)])
            con.lin.emplace_back(lay.c(m, k), -co.A_d(m, k));
        prog.pull_chain.push_back({static_cast<int>(prog.constraints.size()), {lay.lambda_d(k)}});
        prog.constraints.push_back(std::move(con));
    }
    {  // interference + 1 <= Lambda(lambda^2 / zeta)
        const TaylorForm lam = taylor_under(at.lambda_d(k), at.zeta_d(k));
        Constraint con;
        con.kind = Constraint::Kind::QuadLeAffine;
        con.rhs = -1.0;
        con.name = "dl_sinr" + tag;
        const auto& Bk = co.B_d[static_cast<std::size_t>(k)];
        for (int m = 0; m < cfg.M; ++m)
            for (int qd : sets.kappa_d[static_cast<std::size_t>(m)])
                con.quad.emplace_back(lay.c(m, qd), Bk(m, qd));
        for (int l = 0; l < cfg.Ku; ++l)
            if (co.D_d(k, l) != 0.0) con.lin.emplace_back(lay.theta(l), co.D_d(k, l));
        con.lin.emplace_back(lay.lambda_d(k), -lam.coeff_f1);
        con.lin.emplace_back(lay.zeta_d(k), -lam.coeff_f2);
        prog.pull_chain.push_back({static_cast<int>(prog.constraints.size()), {lay.zeta_d(k)}});
        prog.constraints.push_back(std::move(con));
    }
    {  // psi^2 <= tau_f log2(1 + zeta)
        Constraint con;
        con.kind = Constraint::Kind::SquareLeLog;
        con.sq_index = lay.psi_d(k);
        con.log_index = lay.zeta_d(k);
        con.log_scale = co.tau_f / std::log(2.0);
        con.name = "dl_se" + tag;
        prog.pull_chain.push_back({static_cast<int>(prog.constraints.size()), {lay.psi_d(k)}});
        prog.constraints.push_back(std::move(con));
    }
    {  // consumed power <= Lambda(psi^2 / f)
        const TaylorForm lam = taylor_under(at.psi_d(k), at.f_d(k));
        Constraint con;
        con.kind = Constraint::Kind::QuadLeAffine;
        con.rhs = -(p_fix + cfg.Ptc_dl_w);
        con.name = "dl_power" + tag;
        for (int m : sets.M_d[static_cast<std::size_t>(k)])
            con.quad.emplace_back(lay.c(m, k),
                                  cfg.Nt * cfg.rho_d() * cfg.N0_w() * st.gamma_d(m, k) / cfg.alpha_ap);
        con.lin.emplace_back(lay.psi_d(k), -lam.coeff_f1);
        con.lin.emplace_back(lay.f_d(k), -lam.coeff_f2);
        prog.pull_chain.push_back({static_cast<int>(prog.constraints.size()), {lay.f_d(k)}});
        prog.constraints.push_back(std::move(con));
    }
    prog.lower(lay.lambda_d(k)) = 0.0;
    prog.lower(lay.psi_d(k)) = 0.0;
    prog.lower(lay.f_d(k)) = 0.0;
    prog.lower(lay.zeta_d(k)) =
        std::max(0.0, std::exp2(cfg.qos_dl(k) / co.tau_f) - 1.0);
}

/// Uplink analog of emit_dl_family.
inline void emit_ul_family(ConvexProgram& prog, const VarLayout& lay,
                           const SEBoundCoefficients& co, const SCAIterate& at,
                           const ServingSets& sets, const SystemConfig& cfg, double p_fix, int l) {
    const std::string tag = "[l=" + std::to_string(l) + "]";
    if (!(at.zeta_u(l) > 0.0))
        throw SolverError("degenerate linearization: zeta_u" + tag + " <= 0");
    if (!(at.f_u(l) > 0.0)) throw SolverError("degenerate linearization: f_u" + tag + " <= 0");

    {  // lambda^2 <= A_u theta_l
        Constraint con;
        con.kind = Constraint::Kind::QuadLeAffine;
        con.rhs = 0.0;
        con.name = "ul_numerator" + tag;
        con.quad.emplace_back(lay.lambda_u(l), 1.0);
        con.lin.emplace_back(lay.theta(l), -co.A_u(l));
        prog.pull_chain.push_back({static_cast<int>(prog.constraints.size()), {lay.lambda_u(l)}});
        prog.constraints.push_back(std::move(con));
    }
    {  // interference + F <= Lambda(lambda^2 / zeta)
        const TaylorForm lam = taylor_under(at.lambda_u(l), at.zeta_u(l));
        Constraint con;
        con.kind = Constraint::Kind::QuadLeAffine;
        con.rhs = -co.F_u(l);
        con.name = "ul_sinr" + tag;
        for (int qu = 0; qu < cfg.Ku; ++qu) {
            double coeff = co.B_u(l, qu);
            if (qu == l) coeff += co.E_u(l);
            if (coeff != 0.0) con.lin.emplace_back(lay.theta(qu), coeff);
        }
        const auto& Dl = co.D_u[static_cast<std::size_t>(l)];
        for (int i = 0; i < cfg.M; ++i)
            for (int kd : sets.kappa_d[static_cast<std::size_t>(i)])
                if (Dl(i, kd) != 0.0) con.quad.emplace_back(lay.c(i, kd), Dl(i, kd));
        con.lin.emplace_back(lay.lambda_u(l), -lam.coeff_f1);
        con.lin.emplace_back(lay.zeta_u(l), -lam.coeff_f2);
        prog.pull_chain.push_back({static_cast<int>(prog.constraints.size()), {lay.zeta_u(l)}});
        prog.constraints.push_back(std::move(con));
    }
    {
        Constraint con;
        con.kind = Constraint::Kind::SquareLeLog;
        con.sq_index = lay.psi_u(l);
        con.log_index = lay.zeta_u(l);
        con.log_scale = co.tau_f / std::log(2.0);
        con.name = "ul_se" + tag;
        prog.pull_chain.push_back({static_cast<int>(prog.constraints.size()), {lay.psi_u(l)}});
        prog.constraints.push_back(std::move(con));
    }
    {
        const TaylorForm lam = taylor_under(at.psi_u(l), at.f_u(l));
        Constraint con;
        con.kind = Constraint::Kind::Affine;
        con.rhs = -(p_fix + cfg.Ptc_ul_w);
        con.name = "ul_power" + tag;
        con.lin.emplace_back(lay.theta(l), cfg.rho_u() * cfg.N0_w() / cfg.alpha_ue);
        con.lin.emplace_back(lay.psi_u(l), -lam.coeff_f1);
        con.lin.emplace_back(lay.f_u(l), -lam.coeff_f2);
        prog.pull_chain.push_back({static_cast<int>(prog.constraints.size()), {lay.f_u(l)}});
        prog.constraints.push_back(std::move(con));
    }
    prog.lower(lay.lambda_u(l)) = 0.0;
    prog.lower(lay.psi_u(l)) = 0.0;
    prog.lower(lay.f_u(l)) = 0.0;
    prog.lower(lay.zeta_u(l)) =
        std::max(0.0, std::exp2(cfg.qos_ul(l) / co.tau_f) - 1.0);
}

inline void set_primal_boxes(ConvexProgram& prog, const VarLayout& lay, const SystemConfig& cfg) {
    for (int m = 0; m < cfg.M; ++m)
        for (int k = 0; k < cfg.Kd; ++k)
            if (lay.c(m, k) >= 0) prog.lower(lay.c(m, k)) = 0.0;
    for (int l = 0; l < cfg.Ku; ++l) {
        prog.lower(lay.theta(l)) = 0.0;
        prog.upper(lay.theta(l)) = 1.0;
    }
}

}  // namespace detail

/// Everything the GCP builders need besides the iterate.
struct GcpContext {
    const SEBoundCoefficients* coeffs = nullptr;
    const ServingSets* sets = nullptr;
    const LargeScaleState* state = nullptr;
    const QuantizerParams* quant = nullptr;
    const SystemConfig* config = nullptr;
    double p_fix = 0.0;
};

inline GcpContext make_gcp_context(const SEBoundCoefficients& co, const ServingSets& sets,
                                   const LargeScaleState& st, const QuantizerParams& q,
                                   const SystemConfig& cfg) {
    return {&co, &sets, &st, &q, &cfg, fixed_power(sets, cfg)};
}

/// Builds the centralized convexified program at the given iterate: linear
/// objective sum w f over every UE's constraint family.
inline std::pair<ConvexProgram, VarLayout> build_gcp(const GcpContext& ctx, const SCAIterate& at) {
    const SystemConfig& cfg = *ctx.config;
    VarLayout lay = detail::make_layout(*ctx.sets, cfg, -1, -1);
    ConvexProgram prog;
    prog.init(lay.n);
    detail::emit_ap_power(prog, lay, *ctx.state, *ctx.sets, *ctx.quant, cfg);
    for (int k = 0; k < cfg.Kd; ++k)
        detail::emit_dl_family(prog, lay, *ctx.coeffs, at, *ctx.sets, *ctx.state, *ctx.quant, cfg,
                               ctx.p_fix, k);
    for (int l = 0; l < cfg.Ku; ++l)
        detail::emit_ul_family(prog, lay, *ctx.coeffs, at, *ctx.sets, cfg, ctx.p_fix, l);
    detail::set_primal_boxes(prog, lay, cfg);
    for (int k = 0; k < cfg.Kd; ++k) prog.linear(lay.f_d(k)) = cfg.weight_dl(k);
    for (int l = 0; l < cfg.Ku; ++l) prog.linear(lay.f_u(l)) = cfg.weight_ul(l);
    return {std::move(prog), std::move(lay)};
}

inline Eigen::VectorXd pack_iterate(const SCAIterate& at, const VarLayout& lay) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(lay.n);
    for (int m = 0; m < at.c.rows(); ++m)
        for (int k = 0; k < at.c.cols(); ++k)
            if (lay.c(m, k) >= 0) x(lay.c(m, k)) = at.c(m, k);
    for (int l = 0; l < at.theta.size(); ++l)
        if (lay.theta(l) >= 0) x(lay.theta(l)) = at.theta(l);
    auto put = [&x](const Eigen::VectorXi& idx, const Eigen::VectorXd& v) {
        for (int i = 0; i < idx.size(); ++i)
            if (idx(i) >= 0) x(idx(i)) = v(i);
    };
    put(lay.f_d, at.f_d);
    put(lay.psi_d, at.psi_d);
    put(lay.zeta_d, at.zeta_d);
    put(lay.lambda_d, at.lambda_d);
    put(lay.f_u, at.f_u);
    put(lay.psi_u, at.psi_u);
    put(lay.zeta_u, at.zeta_u);
    put(lay.lambda_u, at.lambda_u);
    return x;
}

inline SCAIterate unpack_iterate(const Eigen::VectorXd& x, const VarLayout& lay,
                                 const SCAIterate& fallback) {
    SCAIterate at = fallback;
    for (int m = 0; m < at.c.rows(); ++m)
        for (int k = 0; k < at.c.cols(); ++k)
            if (lay.c(m, k) >= 0) at.c(m, k) = x(lay.c(m, k));
    for (int l = 0; l < at.theta.size(); ++l)
        if (lay.theta(l) >= 0) at.theta(l) = x(lay.theta(l));
    auto get = [&x](const Eigen::VectorXi& idx, Eigen::VectorXd& v) {
        for (int i = 0; i < idx.size(); ++i)
            if (idx(i) >= 0) v(i) = x(idx(i));
    };
    get(lay.f_d, at.f_d);
    get(lay.psi_d, at.psi_d);
    get(lay.zeta_d, at.zeta_d);
    get(lay.lambda_d, at.lambda_d);
    get(lay.f_u, at.f_u);
    get(lay.psi_u, at.psi_u);
    get(lay.zeta_u, at.zeta_u);
    get(lay.lambda_u, at.lambda_u);
    return at;
}

/// Recomputes every epigraph slack from (c, theta) by running the
/// constraint chain at equality: lambda from the numerator, zeta as the
/// exact SINR, psi^2 as the SE, f as the exact efficiency.
inline void recompute_slacks(SCAIterate& at, const GcpContext& ctx) {
    const SystemConfig& cfg = *ctx.config;
    const SEBoundCoefficients& co = *ctx.coeffs;
    const PowerControl pc = at.power_control();
    const auto [p_d, p_u] = consumed_power(pc, *ctx.sets, *ctx.state, cfg);
    for (int k = 0; k < cfg.Kd; ++k) {
        double num = 0.0;
        for (int m : ctx.sets->M_d[static_cast<std::size_t>(k)]) num += co.A_d(m, k) * at.c(m, k);
        at.lambda_d(k) = num;
        at.zeta_d(k) = num * num / dl_denominator(co, pc, k);
        at.psi_d(k) = std::sqrt(co.tau_f * std::log2(1.0 + at.zeta_d(k)));
        at.f_d(k) = at.psi_d(k) * at.psi_d(k) / p_d(k);
    }
    for (int l = 0; l < cfg.Ku; ++l) {
        at.lambda_u(l) = std::sqrt(co.A_u(l) * at.theta(l));
        at.zeta_u(l) = co.A_u(l) * at.theta(l) / ul_denominator(co, pc, l);
        at.psi_u(l) = std::sqrt(co.tau_f * std::log2(1.0 + at.zeta_u(l)));
        at.f_u(l) = at.psi_u(l) * at.psi_u(l) / p_u(l);
    }
}

/// Initial iterate: equal power over each AP's served downlink UEs, full
/// uplink power, slacks by equality. When QoS floors reject that point the
/// downlink powers are scaled by the line-search factor with the best
/// worst-case slack; failure is reported with the violating UEs.
inline SCAIterate init_iterate(const GcpContext& ctx, std::uint64_t seed = 0) {
    const SystemConfig& cfg = *ctx.config;
    SCAIterate at;
    at.theta = Eigen::VectorXd::Ones(cfg.Ku);
    at.f_d.resize(cfg.Kd);
    at.psi_d.resize(cfg.Kd);
    at.zeta_d.resize(cfg.Kd);
    at.lambda_d.resize(cfg.Kd);
    at.f_u.resize(cfg.Ku);
    at.psi_u.resize(cfg.Ku);
    at.zeta_u.resize(cfg.Ku);
    at.lambda_u.resize(cfg.Ku);

    const PowerControl epa1 = baseline_allocation(BaselineKind::EPA1, *ctx.state, *ctx.sets,
                                                  *ctx.quant, cfg, seed);
    auto qos_slack = [&](const PowerControl& pc, std::string* worst) {
        const auto [se_d, se_u] = se_lb(*ctx.coeffs, pc);
        double slack = std::numeric_limits<double>::infinity();
        for (int k = 0; k < cfg.Kd; ++k)
            if (se_d(k) - cfg.qos_dl(k) < slack) {
                slack = se_d(k) - cfg.qos_dl(k);
                if (worst) *worst = "downlink UE " + std::to_string(k);
            }
        for (int l = 0; l < cfg.Ku; ++l)
            if (se_u(l) - cfg.qos_ul(l) < slack) {
                slack = se_u(l) - cfg.qos_ul(l);
                if (worst) *worst = "uplink UE " + std::to_string(l);
            }
        return slack;
    };

    PowerControl pc = epa1;
    std::string worst;
    if (qos_slack(pc, &worst) < 0.0) {
        double best_scale = 1.0, best_slack = -std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 60; ++i) {
            const double scale = std::pow(10.0, -3.0 * i / 60.0);  // 1 down to 1e-3
            PowerControl trial = epa1;
            trial.eta *= scale;
            const double s = qos_slack(trial, nullptr);
            if (s > best_slack) {
                best_slack = s;
                best_scale = scale;
            }
        }
        if (best_slack < 0.0) {
            qos_slack(pc, &worst);
            throw InfeasibleError("QoS floors infeasible at initialization (worst: " + worst + ")");
        }
        pc.eta = epa1.eta * best_scale;
    }

    at.c = pc.eta.cwiseSqrt();
    recompute_slacks(at, ctx);
    for (int k = 0; k < cfg.Kd; ++k)
        if (at.zeta_d(k) < std::exp2(cfg.qos_dl(k) / ctx.coeffs->tau_f) - 1.0)
            throw InfeasibleError("QoS floor infeasible at init for downlink UE " + std::to_string(k));
    for (int l = 0; l < cfg.Ku; ++l)
        if (at.zeta_u(l) < std::exp2(cfg.qos_ul(l) / ctx.coeffs->tau_f) - 1.0)
            throw InfeasibleError("QoS floor infeasible at init for uplink UE " + std::to_string(l));
    return at;
}

struct SCAIterationRecord {
    int iter = 0;
    double wsee = 0.0;       // bit/J, exact closed-form evaluation
    double objective = 0.0;  // same with the bandwidth factor omitted
    double residual = 0.0;   // ||C - C_prev||_F joint with theta
    SolveStatus solver_status = SolveStatus::Optimal;
};

struct SCAReport {
    std::vector<SCAIterationRecord> history;
    bool converged = false;
    int iterations = 0;
    bool monotone = true;  // false if WSEE ever dropped by more than 1e-6
    double final_wsee = 0.0;
};

struct SCAOptions {
    double eps_sca = 1e-3;
    int max_iterations = 100;
    double shrink = 1e-4;
    SolveOptions solver{1e-8, 1.0, 10.0, 600, 1e-10, false};
};

struct SCAResult {
    PowerControl pc;
    SCAReport report;
    SCAIterate final_iterate;
};

/// Centralized WSEE maximization: rebuild the convexified program at each
/// iterate, solve it from a strictly interior start, and repeat until the
/// power-control variables stop moving. `warm_start` overrides the
/// equal-power initialization.
inline SCAResult run_centralized(const GcpContext& ctx, const SCAOptions& opts = {},
                                 std::uint64_t seed = 0,
                                 const SCAIterate* warm_start = nullptr) {
    SCAIterate at = warm_start ? *warm_start : init_iterate(ctx, seed);
    SCAReport rep;
    const double B = ctx.config->B_hz;
    double wsee =
        evaluate_wsee(at.power_control(), *ctx.coeffs, *ctx.sets, *ctx.state, *ctx.config).wsee;
    double prev_obj = wsee / B;

    for (int n = 1; n <= opts.max_iterations; ++n) {
        auto [prog, lay] = build_gcp(ctx, at);
        const Eigen::VectorXd x0 = strict_interior(prog, pack_iterate(at, lay), opts.shrink);
        const SolveReport sol = solve(prog, x0, opts.solver);
        if (sol.status == SolveStatus::InfeasibleStart)
            throw SolverError("SCA subproblem solver failed at iteration " + std::to_string(n));
        SCAIterate next = unpack_iterate(sol.x_star, lay, at);

        const double residual = std::sqrt((next.c - at.c).squaredNorm() +
                                          (next.theta - at.theta).squaredNorm());
        wsee = evaluate_wsee(next.power_control(), *ctx.coeffs, *ctx.sets, *ctx.state, *ctx.config)
                   .wsee;
        if (wsee / B < prev_obj - 1e-6) rep.monotone = false;
        prev_obj = wsee / B;
        rep.history.push_back({n, wsee, wsee / B, residual, sol.status});
        at = next;
        if (residual <= opts.eps_sca) {
            rep.converged = true;
            break;
        }
    }
    rep.iterations = static_cast<int>(rep.history.size());
    rep.final_wsee = wsee;
    return {at.power_control(), std::move(rep), std::move(at)};
}

}  // namespace fdcf

#endif
