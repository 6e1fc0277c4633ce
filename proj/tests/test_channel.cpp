// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "fdcf/channel.hpp"

using namespace fdcf;

namespace {

SystemConfig small_config() {
    SystemConfig cfg;
    cfg.M = 1;
    cfg.Nt = 2;
    cfg.Nr = 2;
    cfg.Kd = 1;
    cfg.Ku = 1;
    cfg.tau_td = 1;
    cfg.tau_tu = 1;
    return cfg;
}

}  // namespace

TEST_CASE("estimate moments match the MMSE statistics") {
    SystemConfig cfg = small_config();
    const Deployment dep = deploy(cfg, 11u);
    const LargeScaleState st = large_scale(dep, cfg, 11u);
    const double gamma = st.gamma_d(0, 0);
    const int trials = 100000;

    double m2 = 0.0, m4 = 0.0;
    Rng rng = substream(11u, "moments");
    for (int t = 0; t < trials; ++t) {
        const ChannelRealization cr = sample_realization(st, cfg, rng, EstimationMode::DirectDraw);
        const double n2 = cr.ghat_d[0].col(0).squaredNorm();
        m2 += n2;
        m4 += n2 * n2;
    }
    m2 /= trials;
    m4 /= trials;
    CHECK(m2 == Catch::Approx(cfg.Nt * gamma).epsilon(0.02));
    CHECK(m4 == Catch::Approx(cfg.Nt * (cfg.Nt + 1) * gamma * gamma).epsilon(0.05));
}

TEST_CASE("pilot projection and direct draw agree in distribution") {
    SystemConfig cfg = small_config();
    const Deployment dep = deploy(cfg, 12u);
    const LargeScaleState st = large_scale(dep, cfg, 12u);
    const int trials = 100000;

    double direct2 = 0.0, pilot2 = 0.0, err_direct = 0.0, err_pilot = 0.0;
    Rng rng_a = substream(12u, "mode-direct");
    Rng rng_b = substream(12u, "mode-pilot");
    for (int t = 0; t < trials; ++t) {
        const ChannelRealization a = sample_realization(st, cfg, rng_a, EstimationMode::DirectDraw);
        const ChannelRealization b =
            sample_realization(st, cfg, rng_b, EstimationMode::PilotProjection);
        direct2 += a.ghat_u[0].col(0).squaredNorm();
        pilot2 += b.ghat_u[0].col(0).squaredNorm();
        err_direct += (a.g_u[0].col(0) - a.ghat_u[0].col(0)).squaredNorm();
        err_pilot += (b.g_u[0].col(0) - b.ghat_u[0].col(0)).squaredNorm();
    }
    CHECK(direct2 / trials == Catch::Approx(pilot2 / trials).epsilon(0.02));
    CHECK(err_direct / trials == Catch::Approx(err_pilot / trials).epsilon(0.02));
    CHECK(pilot2 / trials == Catch::Approx(cfg.Nr * st.gamma_u(0, 0)).epsilon(0.02));
}

TEST_CASE("perfect estimation leaves no error power") {
    SystemConfig cfg = small_config();
    const Deployment dep = deploy(cfg, 13u);
    LargeScaleState st = large_scale(dep, cfg, 13u);
    st.gamma_d(0, 0) = st.beta_d(0, 0);  // gamma = beta limit
    Rng rng = substream(13u, "perfect");
    const ChannelRealization cr = sample_realization(st, cfg, rng, EstimationMode::DirectDraw);
    CHECK((cr.g_d[0].col(0) - cr.ghat_d[0].col(0)).norm() == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("loop channel variance follows beta_ri gamma_ri") {
    SystemConfig cfg = small_config();
    cfg.M = 2;
    const Deployment dep = deploy(cfg, 14u);
    const LargeScaleState st = large_scale(dep, cfg, 14u);
    const int trials = 50000;
    Rng rng = substream(14u, "loop");
    double acc = 0.0;
    for (int t = 0; t < trials; ++t) {
        const ChannelRealization cr = sample_realization(st, cfg, rng, EstimationMode::DirectDraw);
        acc += std::norm(cr.ri(0, 1, cfg.M)(0, 0));
    }
    CHECK(acc / trials == Catch::Approx(st.beta_ri(0, 1) * cfg.gamma_ri).epsilon(0.03));
}
