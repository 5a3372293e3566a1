#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "cirsense/channel_model.hpp"
#include "cirsense/types.hpp"

namespace fixture {

using namespace cirsense;

inline std::filesystem::path source_dir() { return CIRSENSE_SOURCE_DIR; }

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("cirsense_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// LoS plus one breathing target at a relative delay in taps.
inline SceneSpec breathing_scene(const SystemConfig& cfg, double delay_taps, double rate_hz = 0.25,
                                 double amplitude_m = 0.004, double gain = 0.05, double fs = 100.0,
                                 double duration_s = 30.0) {
    SceneSpec s;
    s.name = "breathing";
    s.geometry.separation_m = 0.6;
    s.sample_rate_hz = fs;
    s.duration_s = duration_s;
    MovingTarget t;
    t.trajectory.kind = MotionKind::respiration;
    t.trajectory.base_delay_s = delay_taps * cfg.sample_interval_s();
    t.trajectory.amplitude_m = amplitude_m;
    t.trajectory.rate_hz = rate_hz;
    t.gain.gain = std::polar(gain, 0.3);
    s.targets.push_back(t);
    s.distortion = DistortionPolicy::defaults(cfg);
    return s;
}

/// LoS plus static reflectors, no targets.
inline SceneSpec static_scene(const SystemConfig& cfg, double fs = 100.0, double duration_s = 10.0) {
    SceneSpec s;
    s.name = "static";
    s.geometry.separation_m = 0.6;
    s.sample_rate_hz = fs;
    s.duration_s = duration_s;
    s.reflectors.push_back({std::polar(0.2, 0.7), 3.4 * cfg.sample_interval_s()});
    s.reflectors.push_back({std::polar(0.1, -1.3), 7.75 * cfg.sample_interval_s()});
    s.distortion = DistortionPolicy::defaults(cfg);
    return s;
}

}  // namespace fixture
