#include <doctest.h>

#include <random>

#include "cirsense/cir_recovery.hpp"
#include "cirsense/domino.hpp"
#include "cirsense/dylign.hpp"
#include "cirsense/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cirsense;

namespace {

struct Prepared {
    SystemConfig cfg = SystemConfig::wifi_160mhz();
    SyntheticTrace trace;
    DominoResult clean;
};

Prepared prepare(const SceneSpec& scene) {
    Prepared p;
    p.trace = synth_scene(p.cfg, scene);
    p.clean = align_dominant(p.trace.csi, PartialDftOperator(p.cfg));
    return p;
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::invariant;
}

}  // namespace

TEST_CASE("shift search agrees with a dense variance scan") {
    const SystemConfig cfg = SystemConfig::wifi_160mhz();
    for (double delay : {3.0, 4.12, 6.485, 9.77}) {
        SceneSpec scene = fixture::breathing_scene(cfg, delay, 0.3, 0.005, 0.05, 50.0, 10.0);
        const Prepared p = prepare(scene);
        const PartialDftOperator op(p.cfg);
        const AlignmentResult r = align_dynamic(p.clean, op);
        CHECK(r.tap_index == static_cast<int>(std::lround(delay)));

        const Eigen::RowVectorXcd row = oracle::qr_pinv_row(p.cfg, r.tap_index);
        const double dense = oracle::dense_argmax(
            [&](double s) {
                return oracle::variance(oracle::shifted_tap_from_row(p.cfg, row, p.clean.clean_csi.values, s));
            },
            -0.5, 0.5, 2001);
        CHECK(std::abs(r.fractional_shift - dense) <= 0.5 / 200 + 1e-3);
        CHECK(std::abs(r.delay_taps() - p.trace.truth.mean_relative_delay(0) / cfg.sample_interval_s()) < 0.01);
        CHECK(r.aligned_variance >= r.unshifted_variance);
        CHECK(r.shift_curve.size() == 41);
        CHECK(r.motion_signal.size() == p.trace.csi.frame_count());
    }
}

TEST_CASE("circle fit recovers the radius and the coherence") {
    const SystemConfig cfg = SystemConfig::wifi_160mhz();
    SceneSpec scene = fixture::breathing_scene(cfg, 5.0, 0.25, 0.004, 0.05, 50.0, 40.0);
    const Prepared p = prepare(scene);
    const AlignmentResult r = align_dynamic(p.clean, PartialDftOperator(p.cfg));
    CHECK(r.mean_pulse_gain == doctest::Approx(0.05).epsilon(0.02));
    CHECK(r.coherence == doctest::Approx(p.trace.truth.coherence(0, cfg.carrier_freq_hz)).epsilon(0.02));

    std::vector<cplx> pts;
    for (int i = 0; i < 50; ++i) pts.push_back(cplx(1.0, -2.0) + std::polar(0.3, 0.1 * i));
    const CircleFit fit = fit_circle(pts);
    CHECK(std::abs(fit.center - cplx(1.0, -2.0)) < 1e-9);
    CHECK(fit.radius == doctest::Approx(0.3));
}

TEST_CASE("the gate rejects static and incoherent channels") {
    const SystemConfig cfg = SystemConfig::wifi_160mhz();
    const PartialDftOperator op(cfg);
    SceneSpec quiet = fixture::static_scene(cfg, 100.0, 5.0);
    quiet.distortion_enabled = true;
    quiet.noise_std = 1e-4;
    const Prepared p = prepare(quiet);
    CHECK(code_of([&] { align_dynamic(p.clean, op); }) == ErrorCode::no_motion);

    SceneSpec moving = fixture::breathing_scene(cfg, 6.3);
    moving.distortion_enabled = true;
    const SyntheticTrace trace = synth_scene(cfg, moving);
    const DominoResult raw = passthrough_channel(trace.csi, op);
    CHECK(code_of([&] { align_dynamic(raw, op); }) == ErrorCode::no_motion);
}

TEST_CASE("a target on the candidate boundary is an edge failure") {
    const SystemConfig cfg = SystemConfig::wifi_160mhz();
    const Prepared p = prepare(fixture::breathing_scene(cfg, 20.1, 0.25, 0.004, 0.05, 50.0, 10.0));
    SearchSpec spec;
    spec.candidate_last = 20;
    CHECK(code_of([&] { align_dynamic(p.clean, PartialDftOperator(p.cfg), spec); }) == ErrorCode::edge);
}

TEST_CASE("multi-target alignment separates distant targets") {
    const SystemConfig cfg = SystemConfig::wifi_160mhz();
    SceneSpec scene = fixture::breathing_scene(cfg, 4.3, 0.22, 0.004, 0.05, 50.0, 20.0);
    MovingTarget second = scene.targets.front();
    second.trajectory.base_delay_s = 9.6 * cfg.sample_interval_s();
    second.trajectory.rate_hz = 0.35;
    second.gain.gain = std::polar(0.04, 2.0);
    scene.targets.push_back(second);
    const Prepared p = prepare(scene);
    const PartialDftOperator op(p.cfg);

    const auto results = align_multi(p.clean, op, {}, 3);
    REQUIRE(results.size() == 2);
    std::vector<double> delays{results[0].delay_taps(), results[1].delay_taps()};
    std::sort(delays.begin(), delays.end());
    CHECK(delays[0] == doctest::Approx(4.3).epsilon(0.01));
    CHECK(delays[1] == doctest::Approx(9.6).epsilon(0.01));
    CHECK_FALSE(results[0].interference);
    CHECK_FALSE(results[1].interference);

    const Prepared single = prepare(fixture::breathing_scene(cfg, 7.2, 0.25, 0.004, 0.05, 50.0, 20.0));
    CHECK(align_multi(single.clean, op, {}, 3).size() == 1);
}

TEST_CASE("targets one tap apart are flagged") {
    const SystemConfig cfg = SystemConfig::wifi_160mhz();
    SceneSpec scene = fixture::breathing_scene(cfg, 6.0, 0.22, 0.004, 0.05, 50.0, 20.0);
    MovingTarget second = scene.targets.front();
    second.trajectory.base_delay_s = 7.0 * cfg.sample_interval_s();
    second.trajectory.rate_hz = 0.37;
    second.gain.gain = std::polar(0.05, 1.5);
    scene.targets.push_back(second);
    const Prepared p = prepare(scene);
    const auto results = align_multi(p.clean, PartialDftOperator(p.cfg), {}, 2);
    REQUIRE_FALSE(results.empty());
    CHECK(results[0].interference);
}

TEST_CASE("lagged coherence separates white noise from slow motion") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<cplx> noise, slow;
    for (int t = 0; t < 4000; ++t) {
        noise.emplace_back(g(rng), g(rng));
        slow.push_back(std::polar(1.0, std::sin(2.0 * kPi * 0.25 * t / 100.0)));
    }
    CHECK(lag_one_coherence(noise) < 0.05);
    CHECK(lag_one_coherence(slow) > 0.99);
    CHECK(lagged_coherence(slow, 25) > 0.8);
    CHECK(complex_variance(std::vector<cplx>(10, cplx(2.0, 1.0))) == 0.0);
}

TEST_CASE("windows select frame ranges") {
    const SystemConfig cfg = SystemConfig::wifi_160mhz();
    const Prepared p = prepare(fixture::breathing_scene(cfg, 5.4, 0.25, 0.004, 0.05, 50.0, 20.0));
    const PartialDftOperator op(p.cfg);
    const AlignmentResult r = align_dynamic(p.clean, op, {}, {}, {100, 700});
    CHECK(r.motion_signal.size() == 600);
    CHECK(r.window.begin == 100);
    CHECK(r.window.end == 700);
    CHECK_THROWS_AS(align_dynamic(p.clean, op, {}, {}, {900, 2000}), Error);
    CHECK_THROWS_AS(align_dynamic(p.clean, op, {}, {}, {10, 11}), Error);
}
