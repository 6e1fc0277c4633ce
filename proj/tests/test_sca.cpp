// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "fdcf/sca.hpp"

using namespace fdcf;

namespace {

struct Built {
    SystemConfig cfg;
    LargeScaleState ls;
    QuantizerParams qp;
    ServingSets sets;
    SEBoundCoefficients co;
};

Built build(SystemConfig cfg, std::uint64_t seed) {
    Built b;
    b.cfg = cfg;
    const Deployment dep = deploy(cfg, seed);
    b.ls = large_scale(dep, cfg, seed);
    b.qp = optimize_step(cfg.nu);
    b.sets = select_aps(b.ls, fronthaul_caps(cfg), cfg);
    b.co = se_coefficients(b.ls, b.sets, b.qp, cfg);
    return b;
}

SystemConfig sca_config() {
    SystemConfig cfg;
    cfg.M = 2;
    cfg.Nt = cfg.Nr = 2;
    cfg.Kd = 2;
    cfg.Ku = 2;
    cfg.tau_td = 2;
    cfg.tau_tu = 2;
    cfg.C_fh_bps = 1e8;  // every AP serves everyone
    return cfg;
}

}  // namespace

TEST_CASE("taylor under-estimator") {
    SECTION("tangency at the expansion point") {
        for (double f1 : {0.3, 1.0, 4.7})
            for (double f2 : {0.2, 1.0, 9.0})
                CHECK(taylor_under(f1, f2, f1, f2) == Catch::Approx(f1 * f1 / f2).margin(1e-10));
    }
    SECTION("worked example") {
        CHECK(taylor_under(2.0, 1.0, 1.0, 1.0) == Catch::Approx(3.0));
        CHECK(taylor_under(2.0, 1.0, 1.0, 1.0) <= 4.0);
    }
    SECTION("global under-estimation on random positive points") {
        Rng rng(99);
        for (int i = 0; i < 1000; ++i) {
            const double f1 = rng.uniform(0.01, 10.0);
            const double f2 = rng.uniform(0.01, 10.0);
            const double f1n = rng.uniform(0.01, 10.0);
            const double f2n = rng.uniform(0.01, 10.0);
            CHECK(taylor_under(f1, f2, f1n, f2n) <= f1 * f1 / f2 + 1e-12);
        }
    }
    SECTION("degenerate expansion point is rejected") {
        CHECK_THROWS_AS(taylor_under(1.0, 0.0), SolverError);
    }
}

TEST_CASE("initial iterate replays the equal-power allocation") {
    const Built b = build(sca_config(), 51u);
    const GcpContext ctx = make_gcp_context(b.co, b.sets, b.ls, b.qp, b.cfg);
    const SCAIterate at = init_iterate(ctx, 51u);

    const PowerControl epa1 =
        baseline_allocation(BaselineKind::EPA1, b.ls, b.sets, b.qp, b.cfg, 51u);
    CHECK((at.c.cwiseProduct(at.c) - epa1.eta).cwiseAbs().maxCoeff() <= 1e-12);

    // slack-equality chain: f equals psi^2 / p, and the weighted sum equals
    // the exact WSEE of the equal-power point
    const auto [p_d, p_u] = consumed_power(epa1, b.sets, b.ls, b.cfg);
    for (int k = 0; k < b.cfg.Kd; ++k)
        CHECK(at.f_d(k) == Catch::Approx(at.psi_d(k) * at.psi_d(k) / p_d(k)).epsilon(1e-12));
    double swf = 0.0;
    for (int k = 0; k < b.cfg.Kd; ++k) swf += b.cfg.weight_dl(k) * at.f_d(k);
    for (int l = 0; l < b.cfg.Ku; ++l) swf += b.cfg.weight_ul(l) * at.f_u(l);
    const EnergyReport rep = evaluate_wsee(epa1, b.co, b.sets, b.ls, b.cfg);
    CHECK(swf * b.cfg.B_hz == Catch::Approx(rep.wsee).epsilon(1e-9));
}

TEST_CASE("built program: audited constraint count and iterate feasibility") {
    const Built b = build(sca_config(), 52u);
    const GcpContext ctx = make_gcp_context(b.co, b.sets, b.ls, b.qp, b.cfg);
    const SCAIterate at = init_iterate(ctx, 52u);
    auto [prog, lay] = build_gcp(ctx, at);

    // 2 AP power rows + 4 rows per UE family, (M, Kd, Ku) = (2, 2, 2)
    CHECK(prog.constraints.size() == 18);
    CHECK(lay.n == 2 * 2 + 2 + 4 * 4);  // served c + theta + 4 slacks x 4 UEs

    // the expansion point satisfies every constraint (tangency makes the
    // linearized rows tight, not violated)
    const Eigen::VectorXd x = pack_iterate(at, lay);
    CHECK(prog.max_violation(x) <= 1e-9);

    // and the strict-interior repair opens every slack
    const Eigen::VectorXd xs = strict_interior(prog, x, 1e-4);
    CHECK(prog.strictly_feasible(xs));

    SECTION("zero QoS floor leaves the zeta box at zero") {
        CHECK(prog.lower(lay.zeta_d(0)) == 0.0);
    }

    SECTION("QoS floors tighten the zeta lower bound") {
        SystemConfig cfg2 = b.cfg;
        cfg2.S_o_dl.assign(2, 0.5);
        const GcpContext ctx2 = make_gcp_context(b.co, b.sets, b.ls, b.qp, cfg2);
        const SCAIterate at2 = init_iterate(ctx2, 52u);
        auto [prog2, lay2] = build_gcp(ctx2, at2);
        CHECK(prog2.lower(lay2.zeta_d(0)) ==
              Catch::Approx(std::exp2(0.5 / b.co.tau_f) - 1.0));
    }
}

TEST_CASE("centralized SCA improves on the equal-power start and converges") {
    const Built b = build(sca_config(), 53u);
    const GcpContext ctx = make_gcp_context(b.co, b.sets, b.ls, b.qp, b.cfg);
    SCAOptions opts;
    const SCAResult res = run_centralized(ctx, opts, 53u);

    REQUIRE(res.report.converged);
    CHECK(res.report.iterations <= 50);
    CHECK(res.report.monotone);

    const PowerControl epa1 =
        baseline_allocation(BaselineKind::EPA1, b.ls, b.sets, b.qp, b.cfg, 53u);
    const double wsee_epa1 = evaluate_wsee(epa1, b.co, b.sets, b.ls, b.cfg).wsee;
    CHECK(res.report.final_wsee >= wsee_epa1 - 1e-6);

    // exact feasibility of the final point
    CHECK(power_constraints_ok(res.pc, b.ls, b.sets, b.qp, b.cfg, 1e-9));

    SECTION("restart at the optimum converges immediately") {
        const SCAResult again = run_centralized(ctx, opts, 53u, &res.final_iterate);
        CHECK(again.report.iterations <= 2);
        CHECK(again.report.final_wsee == Catch::Approx(res.report.final_wsee).epsilon(1e-4));
    }
}

TEST_CASE("QoS floors hold at the converged point with exact SE formulas") {
    SystemConfig cfg = sca_config();
    cfg.S_o_dl.assign(2, 0.1);
    cfg.S_o_ul.assign(2, 0.1);
    const Built b = build(cfg, 54u);
    const GcpContext ctx = make_gcp_context(b.co, b.sets, b.ls, b.qp, b.cfg);
    const SCAResult res = run_centralized(ctx, {}, 54u);
    const auto [se_d, se_u] = se_lb(b.co, res.pc);
    for (int k = 0; k < cfg.Kd; ++k) CHECK(se_d(k) >= 0.1 - 1e-9);
    for (int l = 0; l < cfg.Ku; ++l) CHECK(se_u(l) >= 0.1 - 1e-9);
}

TEST_CASE("impossible QoS floors are reported as infeasible") {
    SystemConfig cfg = sca_config();
    cfg.S_o_dl.assign(2, 50.0);  // far beyond anything achievable
    const Built b = build(cfg, 55u);
    const GcpContext ctx = make_gcp_context(b.co, b.sets, b.ls, b.qp, b.cfg);
    CHECK_THROWS_AS(init_iterate(ctx, 55u), InfeasibleError);
}
