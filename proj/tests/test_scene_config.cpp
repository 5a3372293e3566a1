#include <doctest.h>

#include <string>

#include "cirsense/error.hpp"
#include "cirsense/scene_config.hpp"
#include "fixtures.hpp"

using namespace cirsense;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_scene(text, "t.json");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::config);
        return e.what();
    }
    FAIL("expected a config error");
    return {};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("bundled scenes parse") {
    for (const char* name : {"validation", "slider", "respiration", "multi_target", "static_distorted"}) {
        CAPTURE(name);
        const SceneFile f = load_scene(fixture::source_dir() / "scenes" / (std::string(name) + ".json"));
        CHECK(f.scene.name == name);
        CHECK_NOTHROW(f.scene.validate());
        CHECK(f.system.active_subcarriers.size() == 496);
    }
}

TEST_CASE("validation scene carries its stated geometry") {
    const SceneFile f = load_scene(fixture::source_dir() / "scenes" / "validation.json");
    const double ts = f.system.sample_interval_s();
    CHECK(f.scene.sample_rate_hz == 500.0);
    CHECK(f.scene.duration_s == 30.0);
    CHECK(f.scene.frame_count() == 15000);
    REQUIRE(f.scene.targets.size() == 1);
    CHECK(f.scene.targets[0].trajectory.base_delay_s / ts == doctest::Approx(2.485));
    CHECK(f.scene.distortion_enabled);
    REQUIRE(f.ssnr_db);
    CHECK(*f.ssnr_db == 20.0);
    CHECK(f.scene.noise_std == doctest::Approx(noise_std_for_ssnr(0.05, 20.0)));
}

TEST_CASE("slider scene sweeps the stated path change") {
    const SceneFile f = load_scene(fixture::source_dir() / "scenes" / "slider.json");
    const auto& traj = f.scene.targets.at(0).trajectory;
    CHECK(traj.kind == MotionKind::linear_sweep);
    const double c = f.system.light_speed_mps;
    const double lambda = c / f.system.carrier_freq_hz;
    const double p0 = f.scene.geometry.path_length(traj.range_at(0.0, f.scene.geometry, c));
    const double p1 = f.scene.geometry.path_length(traj.range_at(3.2, f.scene.geometry, c));
    CHECK((p1 - p0) / lambda == doctest::Approx(8.5).epsilon(1e-6));
}

TEST_CASE("delay can be given in several units") {
    const std::string head = R"({"name":"u","sample_rate_hz":100,"duration_s":1,"geometry":{"d0_m":0.6},"targets":[{"kind":"static",)";
    const std::string tail = R"(,"gain":{"magnitude":0.1}}]})";
    const SceneFile taps = parse_scene(head + R"("relative_delay_taps":4)" + tail);
    const double ts = taps.system.sample_interval_s();
    CHECK(taps.scene.targets[0].trajectory.base_delay_s == doctest::Approx(4 * ts));
    const SceneFile secs = parse_scene(head + R"("relative_delay_s":25e-9)" + tail);
    CHECK(secs.scene.targets[0].trajectory.base_delay_s == doctest::Approx(25e-9));
    const SceneFile path = parse_scene(head + R"("relative_path_m":1.5)" + tail);
    CHECK(path.scene.targets[0].trajectory.base_delay_s == doctest::Approx(1.5 / taps.system.light_speed_mps));
    const SceneFile range = parse_scene(head + R"("range_m":4)" + tail);
    CHECK(range.scene.targets[0].trajectory.base_delay_s * range.system.light_speed_mps ==
          doctest::Approx(range.scene.geometry.relative_path(4.0)));
    CHECK(contains(error_of(head + R"("relative_delay_taps":4,"range_m":4)" + tail), "/targets/0"));
}

TEST_CASE("syntax errors report line and column") {
    const std::string msg = error_of("{\n  \"name\": \"x\",\n  \"duration_s\": ,\n}");
    CHECK(contains(msg, "t.json"));
    CHECK(contains(msg, "line 3"));
    CHECK(contains(msg, "column"));
}

TEST_CASE("semantic errors report the JSON pointer") {
    CHECK(contains(error_of(R"({"name":"x","sample_rate":100})"), "/sample_rate: unknown key"));
    const std::string head = R"({"name":"x","duration_s":1,)";
    CHECK(contains(error_of(head + R"("sample_rate_hz":-5})"), "/sample_rate_hz"));
    CHECK(contains(error_of(head + R"("sample_rate_hz":100,"targets":[{"kind":"dance","relative_delay_taps":2,"gain":{"magnitude":1}}]})"),
                   "/targets/0/kind"));
    CHECK(contains(error_of(head + R"("sample_rate_hz":100,"system":{"dft_size":"big"}})"), "/system/dft_size"));
    CHECK(contains(error_of(head + R"("sample_rate_hz":100,"noise":{"ssnr_db":20,"std":0.1}})"), "/noise"));
    CHECK(contains(error_of(R"({"name":"x","sample_rate_hz":100})"), "/duration_s: required field is missing"));
}

TEST_CASE("system block overrides the defaults") {
    const SystemConfig cfg = parse_system(R"({"subcarriers":{"first":-100,"last":100},"taps":{"first":-5,"last":20}})");
    CHECK(cfg.active_subcarriers.size() == 201);
    CHECK(cfg.tap_min() == -5);
    CHECK(cfg.tap_set.size() == 26);
    CHECK(parse_system("{}").active_subcarriers.size() == 496);
}
