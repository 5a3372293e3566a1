#include <doctest.h>

#include "cirsense/cir_recovery.hpp"
#include "cirsense/domino.hpp"
#include "cirsense/error.hpp"
#include "fixtures.hpp"

using namespace cirsense;

namespace {

double max_tap_cv(const CirSeries& c) {
    double worst = 0.0;
    for (Eigen::Index r = 0; r < c.taps.rows(); ++r) {
        const auto row = c.taps.row(r);
        const cplx mean = row.mean();
        if (std::abs(mean) < 1e-6) continue;
        const double sd = std::sqrt((row.array() - mean).abs2().mean());
        worst = std::max(worst, sd / std::abs(mean));
    }
    return worst;
}

}  // namespace

TEST_CASE("distortions cancel on a static scene") {
    const SystemConfig cfg = SystemConfig::wifi_160mhz();
    const PartialDftOperator op(cfg);
    SceneSpec scene = fixture::static_scene(cfg, 100.0, 3.0);
    scene.distortion_enabled = true;
    const SyntheticTrace trace = synth_scene(cfg, scene);
    const DominoResult r = align_dominant(trace.csi, op);

    CHECK(max_tap_cv(r.clean) < 1e-9);
    CHECK((r.clean.tap(0).array() - cplx(1.0, 0.0)).abs().maxCoeff() == 0.0);
    CHECK(r.flagged(kDominanceAmbiguous) == 0);
    CHECK(r.flagged(kWeakReference) == 0);

    // per_frame_shift tracks -(tau_0 + eps) / T_s up to a constant
    const double ts = cfg.sample_interval_s();
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    for (std::size_t t = 0; t < r.per_frame_shift.size(); ++t) {
        const double v = r.per_frame_shift[t] + (trace.truth.los_delay_s + trace.truth.distortions[t].delay_shift_s) / ts;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi - lo < 1e-6);
}

TEST_CASE("different distortion sequences give the same clean channel") {
    const SystemConfig cfg = SystemConfig::wifi_160mhz();
    const PartialDftOperator op(cfg);
    SceneSpec a = fixture::static_scene(cfg, 100.0, 2.0);
    a.distortion_enabled = true;
    SceneSpec b = a;
    b.seed = a.seed + 1000;
    const DominoResult ra = align_dominant(synth_scene(cfg, a).csi, op);
    const DominoResult rb = align_dominant(synth_scene(cfg, b).csi, op);
    CHECK((ra.clean.taps - rb.clean.taps).cwiseAbs().maxCoeff() / ra.clean.taps.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("a grid-only search leaves a residual that the polish removes") {
    const SystemConfig cfg = SystemConfig::wifi_160mhz();
    const PartialDftOperator op(cfg);
    SceneSpec scene = fixture::static_scene(cfg, 100.0, 1.0);
    scene.distortion_enabled = true;
    const CsiSeries csi = synth_scene(cfg, scene).csi;
    DominoOptions grid_only;
    grid_only.polish = false;
    const double grid_cv = max_tap_cv(align_dominant(csi, op, grid_only).clean);
    const double polished_cv = max_tap_cv(align_dominant(csi, op).clean);
    CHECK(grid_cv > 1e-6);
    CHECK(polished_cv < 1e-9);
}

TEST_CASE("frames are flagged when the reference does not dominate") {
    const SystemConfig cfg = SystemConfig::wifi_160mhz();
    const PartialDftOperator op(cfg);
    SceneSpec scene = fixture::static_scene(cfg, 100.0, 0.5);
    scene.reflectors = {{std::polar(0.95, 1.0), 4.0 * cfg.sample_interval_s()}};
    const DominoResult r = align_dominant(synth_scene(cfg, scene).csi, op);
    CHECK(r.flagged(kDominanceAmbiguous) == r.flags.size());
}

TEST_CASE("an empty frame is flagged weak and zeroed") {
    const SystemConfig cfg = SystemConfig::wifi_160mhz();
    const PartialDftOperator op(cfg);
    SceneSpec scene = fixture::static_scene(cfg, 100.0, 0.1);
    CsiSeries csi = synth_scene(cfg, scene).csi;
    csi.values.col(3).setZero();
    const DominoResult r = align_dominant(csi, op);
    CHECK((r.flags[3] & kWeakReference) != 0);
    CHECK(r.clean.taps.col(3).cwiseAbs().maxCoeff() == 0.0);
    CHECK((r.flags[2] & kWeakReference) == 0);
}

TEST_CASE("passthrough keeps the raw channel") {
    const SystemConfig cfg = SystemConfig::wifi_160mhz();
    const PartialDftOperator op(cfg);
    const CsiSeries csi = synth_scene(cfg, fixture::static_scene(cfg, 100.0, 0.2)).csi;
    const DominoResult r = passthrough_channel(csi, op);
    CHECK(r.clean.taps == recover_cir(op, csi).taps);
    for (double s : r.per_frame_shift) CHECK(s == 0.0);
}

TEST_CASE("alignment needs tap 0 and a matching operator") {
    SystemConfig cfg = SystemConfig::wifi_160mhz();
    const CsiSeries csi = synth_scene(cfg, fixture::static_scene(cfg, 100.0, 0.1)).csi;
    SystemConfig shifted = cfg;
    shifted.tap_set = contiguous_range(1, 50);
    CHECK_THROWS_AS(align_dominant(csi, PartialDftOperator(shifted)), Error);
    SystemConfig other = cfg;
    other.active_subcarriers = symmetric_subcarriers(200, 3);
    CHECK_THROWS_AS(align_dominant(csi, PartialDftOperator(other)), Error);
}
