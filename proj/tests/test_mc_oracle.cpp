// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "fdcf/mc_oracle.hpp"

using namespace fdcf;

namespace {

struct Built {
    SystemConfig cfg;
    LargeScaleState ls;
    QuantizerParams qp;
    ServingSets sets;
    SEBoundCoefficients co;
    PowerControl pc;
};

Built build_tiny(std::uint64_t seed) {
    SystemConfig cfg;
    cfg.M = 2;
    cfg.Nt = cfg.Nr = 2;
    cfg.Kd = 2;
    cfg.Ku = 2;
    cfg.tau_td = 2;
    cfg.tau_tu = 2;
    Built b;
    b.cfg = cfg;
    const Deployment dep = deploy(cfg, seed);
    b.ls = large_scale(dep, cfg, seed);
    b.qp = optimize_step(cfg.nu);
    b.sets = select_aps(b.ls, fronthaul_caps(cfg), cfg);
    b.co = se_coefficients(b.ls, b.sets, b.qp, cfg);
    b.pc = baseline_allocation(BaselineKind::EPA1, b.ls, b.sets, b.qp, cfg, seed);
    return b;
}

}  // namespace

TEST_CASE("zero transmit power gives zero ergodic SE") {
    Built b = build_tiny(41u);
    PowerControl off;
    off.eta = Eigen::MatrixXd::Zero(b.cfg.M, b.cfg.Kd);
    off.theta = Eigen::VectorXd::Zero(b.cfg.Ku);
    const McSeResult res = mc_ergodic_se(b.ls, b.sets, b.qp, off, b.cfg, 200, 41u);
    CHECK(res.ub_d.cwiseAbs().maxCoeff() == 0.0);
    CHECK(res.ub_u.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("standard error shrinks like one over sqrt trials") {
    const Built b = build_tiny(42u);
    const McSeResult small = mc_ergodic_se(b.ls, b.sets, b.qp, b.pc, b.cfg, 300, 42u);
    const McSeResult large = mc_ergodic_se(b.ls, b.sets, b.qp, b.pc, b.cfg, 3000, 42u);
    for (int k = 0; k < b.cfg.Kd; ++k) {
        const double ratio = large.stderr_d(k) / small.stderr_d(k);
        CHECK(ratio > 0.2);
        CHECK(ratio < 0.5);  // expected about 1/sqrt(10) = 0.316
    }
}

TEST_CASE("closed-form bound sits below the ergodic estimate") {
    const Built b = build_tiny(43u);
    const auto [lb_d, lb_u] = se_lb(b.co, b.pc);
    const McSeResult mc = mc_ergodic_se(b.ls, b.sets, b.qp, b.pc, b.cfg, 400, 43u);
    for (int k = 0; k < b.cfg.Kd; ++k) CHECK(lb_d(k) <= mc.ub_d(k) + 3.0 * mc.stderr_d(k));
    for (int l = 0; l < b.cfg.Ku; ++l) CHECK(lb_u(l) <= mc.ub_u(l) + 3.0 * mc.stderr_u(l));
}

TEST_CASE("term powers: Monte Carlo tracks every closed form") {
    const Built b = build_tiny(44u);
    const TermPowers cf = closed_term_powers(b.ls, b.sets, b.qp, b.pc, b.cfg);
    const TermPowers mc = mc_term_powers(b.ls, b.sets, b.qp, b.pc, b.cfg, 4000, 44u);
    auto close = [](double ref, double est, double tol) {
        return std::fabs(est - ref) <= tol * std::fabs(ref);
    };
    for (int k = 0; k < b.cfg.Kd; ++k) {
        CHECK(close(cf.dl_ds(k), mc.dl_ds(k), 0.10));
        CHECK(close(cf.dl_bu(k), mc.dl_bu(k), 0.15));
        CHECK(close(cf.dl_mui(k), mc.dl_mui(k), 0.15));
        CHECK(close(cf.dl_udi(k), mc.dl_udi(k), 0.15));
        CHECK(close(cf.dl_tqd(k), mc.dl_tqd(k), 0.15));
    }
    for (int l = 0; l < b.cfg.Ku; ++l) {
        CHECK(close(cf.ul_ds(l), mc.ul_ds(l), 0.10));
        CHECK(close(cf.ul_bu(l), mc.ul_bu(l), 0.15));
        CHECK(close(cf.ul_mui(l), mc.ul_mui(l), 0.15));
        CHECK(close(cf.ul_ri(l), mc.ul_ri(l), 0.15));
        CHECK(close(cf.ul_n(l), mc.ul_n(l), 0.15));
        CHECK(close(cf.ul_tqd(l), mc.ul_tqd(l), 0.15));
    }
}

TEST_CASE("no loop suppression leaves no measured loop power") {
    SystemConfig cfg;
    cfg.M = 2;
    cfg.Nt = cfg.Nr = 2;
    cfg.Kd = 2;
    cfg.Ku = 2;
    cfg.tau_td = 2;
    cfg.tau_tu = 2;
    cfg.gamma_ri = 0.0;
    const Deployment dep = deploy(cfg, 45u);
    const LargeScaleState ls = large_scale(dep, cfg, 45u);
    const QuantizerParams qp = optimize_step(cfg.nu);
    const ServingSets sets = select_aps(ls, fronthaul_caps(cfg), cfg);
    const PowerControl pc = baseline_allocation(BaselineKind::EPA1, ls, sets, qp, cfg, 45u);
    const TermPowers mc = mc_term_powers(ls, sets, qp, pc, cfg, 500, 45u);
    CHECK(mc.ul_ri.cwiseAbs().maxCoeff() == Catch::Approx(0.0).margin(1e-20));
}
