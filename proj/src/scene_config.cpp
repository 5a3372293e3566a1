#include "cirsense/scene_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "config_json.hpp"

namespace cirsense {

namespace detail {

void fail_at(ErrorCode code, const std::string& pointer, const std::string& message) {
    throw Error(code, (pointer.empty() ? std::string("/") : pointer) + ": " + message);
}

void check_keys(const json& object, const std::string& pointer, std::initializer_list<std::string_view> allowed,
                ErrorCode code) {
    if (!object.is_object()) fail_at(code, pointer, "expected an object");
    for (const auto& item : object.items()) {
        bool known = false;
        for (std::string_view key : allowed) known = known || item.key() == key;
        if (!known) fail_at(code, pointer + "/" + item.key(), "unknown key");
    }
}

const json& require(const json& object, const std::string& pointer, const std::string& key, ErrorCode code) {
    if (!object.is_object()) fail_at(code, pointer, "expected an object");
    const auto it = object.find(key);
    if (it == object.end()) fail_at(code, pointer + "/" + key, "required field is missing");
    return *it;
}

double number(const json& value, const std::string& pointer, ErrorCode code) {
    if (!value.is_number()) fail_at(code, pointer, "expected a number");
    const double v = value.get<double>();
    if (!std::isfinite(v)) fail_at(code, pointer, "must be finite");
    return v;
}

double number_or(const json& object, const std::string& pointer, const std::string& key, double fallback,
                 ErrorCode code) {
    const auto it = object.find(key);
    return it == object.end() ? fallback : number(*it, pointer + "/" + key, code);
}

long long integer(const json& value, const std::string& pointer, ErrorCode code) {
    if (!value.is_number_integer()) fail_at(code, pointer, "expected an integer");
    return value.get<long long>();
}

std::string text(const json& value, const std::string& pointer, ErrorCode code) {
    if (!value.is_string()) fail_at(code, pointer, "expected a string");
    return value.get<std::string>();
}

json system_to_json(const SystemConfig& cfg) {
    return json{{"carrier_freq_hz", cfg.carrier_freq_hz},
                {"bandwidth_hz", cfg.bandwidth_hz},
                {"dft_size", cfg.dft_size},
                {"subcarriers", cfg.active_subcarriers},
                {"taps", {{"first", cfg.tap_min()}, {"last", cfg.tap_max()}}},
                {"light_speed_mps", cfg.light_speed_mps}};
}

namespace {

std::vector<int> int_list(const json& value, const std::string& pointer, ErrorCode code) {
    if (!value.is_array()) fail_at(code, pointer, "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < value.size(); ++i)
        out.push_back(static_cast<int>(integer(value[i], pointer + "/" + std::to_string(i), code)));
    return out;
}

std::vector<int> index_set(const json& value, const std::string& pointer, ErrorCode code) {
    if (value.is_array()) return int_list(value, pointer, code);
    if (value.contains("edge")) {
        check_keys(value, pointer, {"edge", "dc_guard"}, code);
        const auto edge = integer(require(value, pointer, "edge", code), pointer + "/edge", code);
        const auto guard = integer(require(value, pointer, "dc_guard", code), pointer + "/dc_guard", code);
        if (guard < 1 || edge < guard) fail_at(code, pointer, "need 1 <= dc_guard <= edge");
        return symmetric_subcarriers(static_cast<int>(edge), static_cast<int>(guard));
    }
    check_keys(value, pointer, {"first", "last"}, code);
    const auto first = integer(require(value, pointer, "first", code), pointer + "/first", code);
    const auto last = integer(require(value, pointer, "last", code), pointer + "/last", code);
    if (last < first) fail_at(code, pointer, "last must be >= first");
    return contiguous_range(static_cast<int>(first), static_cast<int>(last));
}

}  // namespace

SystemConfig system_from_json(const json& object, const std::string& pointer, ErrorCode code) {
    check_keys(object, pointer,
               {"carrier_freq_hz", "bandwidth_hz", "dft_size", "subcarriers", "taps", "light_speed_mps"}, code);
    SystemConfig cfg = SystemConfig::wifi_160mhz();
    cfg.carrier_freq_hz = number_or(object, pointer, "carrier_freq_hz", cfg.carrier_freq_hz, code);
    cfg.bandwidth_hz = number_or(object, pointer, "bandwidth_hz", cfg.bandwidth_hz, code);
    cfg.light_speed_mps = number_or(object, pointer, "light_speed_mps", cfg.light_speed_mps, code);
    if (object.contains("dft_size"))
        cfg.dft_size = static_cast<int>(integer(object["dft_size"], pointer + "/dft_size", code));
    if (object.contains("subcarriers"))
        cfg.active_subcarriers = index_set(object["subcarriers"], pointer + "/subcarriers", code);
    if (object.contains("taps")) cfg.tap_set = index_set(object["taps"], pointer + "/taps", code);
    try {
        cfg.validate();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::rank_deficient) throw;
        fail_at(code, pointer, e.what());
    }
    return cfg;
}

}  // namespace detail

namespace {

using detail::json;
using detail::check_keys;
using detail::fail_at;
using detail::number;
using detail::number_or;
using detail::require;

cplx complex_gain(const json& object, const std::string& pointer, double magnitude_default) {
    const double mag = number_or(object, pointer, "magnitude", magnitude_default);
    const double phase = number_or(object, pointer, "phase_rad", 0.0);
    if (!(mag >= 0.0)) fail_at(ErrorCode::config, pointer + "/magnitude", "must be >= 0");
    return std::polar(mag, phase);
}

// Relative delay from exactly one of relative_delay_taps, relative_delay_s, range_m, relative_path_m.
double relative_delay(const json& object, const std::string& pointer, const std::string& prefix,
                      const SystemConfig& sys, const BistaticGeometry& geom) {
    const double c = sys.light_speed_mps;
    int given = 0;
    double delay = 0.0;
    if (object.contains(prefix + "relative_delay_taps")) {
        delay = number(object[prefix + "relative_delay_taps"], pointer + "/" + prefix + "relative_delay_taps") *
                sys.sample_interval_s();
        ++given;
    }
    if (object.contains(prefix + "relative_delay_s")) {
        delay = number(object[prefix + "relative_delay_s"], pointer + "/" + prefix + "relative_delay_s");
        ++given;
    }
    if (object.contains(prefix + "relative_path_m")) {
        delay = number(object[prefix + "relative_path_m"], pointer + "/" + prefix + "relative_path_m") / c;
        ++given;
    }
    if (object.contains(prefix + "range_m")) {
        const double range = number(object[prefix + "range_m"], pointer + "/" + prefix + "range_m");
        if (range < 0.0) fail_at(ErrorCode::config, pointer + "/" + prefix + "range_m", "must be >= 0");
        delay = geom.relative_path(range) / c;
        ++given;
    }
    if (given != 1)
        fail_at(ErrorCode::config, pointer,
                "give exactly one of " + prefix + "relative_delay_taps, " + prefix + "relative_delay_s, " + prefix +
                    "relative_path_m, " + prefix + "range_m");
    if (delay < 0.0) fail_at(ErrorCode::config, pointer, "relative delay must be >= 0");
    return delay;
}

MovingTarget parse_target(const json& object, const std::string& pointer, const SystemConfig& sys,
                          const SceneSpec& scene) {
    check_keys(object, pointer,
               {"kind", "relative_delay_taps", "relative_delay_s", "relative_path_m", "range_m", "amplitude_m",
                "rate_hz", "phase_rad", "start_relative_delay_taps", "start_relative_delay_s",
                "start_relative_path_m", "start_range_m", "end_relative_delay_taps", "end_relative_delay_s",
                "end_relative_path_m", "end_range_m", "path_change_wavelengths", "sweep_duration_s", "gain",
                "decay"});
    MovingTarget target;
    MotionTrajectory& traj = target.trajectory;
    const std::string kind = detail::text(require(object, pointer, "kind"), pointer + "/kind");
    const BistaticGeometry& geom = scene.geometry;
    const double c = sys.light_speed_mps;
    if (kind == "static" || kind == "stationary") {
        traj.kind = MotionKind::stationary;
        traj.base_delay_s = relative_delay(object, pointer, "", sys, geom);
    } else if (kind == "respiration") {
        traj.kind = MotionKind::respiration;
        traj.base_delay_s = relative_delay(object, pointer, "", sys, geom);
        traj.amplitude_m = number(require(object, pointer, "amplitude_m"), pointer + "/amplitude_m");
        traj.rate_hz = number(require(object, pointer, "rate_hz"), pointer + "/rate_hz");
        traj.phase_rad = number_or(object, pointer, "phase_rad", 0.0);
    } else if (kind == "linear_sweep") {
        traj.kind = MotionKind::linear_sweep;
        const double start = relative_delay(object, pointer, "start_", sys, geom);
        double end_path = 0.0;
        if (object.contains("path_change_wavelengths")) {
            end_path = start * c + number(object["path_change_wavelengths"], pointer + "/path_change_wavelengths") *
                                       sys.wavelength_m();
            if (end_path < 0.0) fail_at(ErrorCode::config, pointer + "/path_change_wavelengths", "path below d0");
        } else {
            end_path = relative_delay(object, pointer, "end_", sys, geom) * c;
        }
        traj.sweep_start_m = geom.range_for_relative_path(start * c);
        traj.sweep_end_m = geom.range_for_relative_path(end_path);
        traj.duration_s = number_or(object, pointer, "sweep_duration_s", scene.duration_s);
    } else {
        fail_at(ErrorCode::config, pointer + "/kind", "unknown kind '" + kind + "' (static, respiration, linear_sweep)");
    }
    try {
        traj.validate();
    } catch (const Error& e) {
        fail_at(ErrorCode::config, pointer, e.what());
    }

    if (object.contains("gain")) {
        const json& g = object["gain"];
        const std::string gp = pointer + "/gain";
        check_keys(g, gp, {"magnitude", "phase_rad", "reflectivity"});
        if (g.contains("reflectivity")) {
            if (g.contains("magnitude")) fail_at(ErrorCode::config, gp, "give magnitude or reflectivity, not both");
            // amplitude relative to the LoS, which falls off as 1/d0
            const double refl = number(g["reflectivity"], gp + "/reflectivity");
            if (!(refl >= 0.0)) fail_at(ErrorCode::config, gp + "/reflectivity", "must be >= 0");
            const double path0 = geom.separation_m + c * (traj.kind == MotionKind::linear_sweep
                                                              ? geom.relative_path(traj.sweep_start_m) / c
                                                              : traj.base_delay_s);
            target.gain.gain = std::polar(refl * geom.separation_m / path0, number_or(g, gp, "phase_rad", 0.0));
        } else {
            target.gain.gain = complex_gain(g, gp, 0.05);
        }
    }
    if (object.contains("decay")) {
        const std::string decay = detail::text(object["decay"], pointer + "/decay");
        if (decay == "constant") {
            target.gain.decay = GainDecay::constant;
        } else if (decay == "inverse_distance") {
            target.gain.decay = GainDecay::inverse_distance;
        } else {
            fail_at(ErrorCode::config, pointer + "/decay", "unknown decay '" + decay + "' (constant, inverse_distance)");
        }
    }
    return target;
}

std::pair<double, double> range_pair(const json& value, const std::string& pointer) {
    if (!value.is_array() || value.size() != 2) fail_at(ErrorCode::config, pointer, "expected [min, max]");
    const double lo = number(value[0], pointer + "/0");
    const double hi = number(value[1], pointer + "/1");
    if (hi < lo) fail_at(ErrorCode::config, pointer, "max must be >= min");
    return {lo, hi};
}

SceneFile parse_document(const json& doc) {
    check_keys(doc, "",
               {"name", "system", "sample_rate_hz", "duration_s", "geometry", "los", "reflectors", "targets",
                "distortion", "noise", "separable", "seed"});
    SceneFile out;
    out.system = doc.contains("system") ? detail::system_from_json(doc["system"], "/system")
                                        : SystemConfig::wifi_160mhz();
    const SystemConfig& sys = out.system;
    SceneSpec& scene = out.scene;
    scene.name = doc.contains("name") ? detail::text(doc["name"], "/name") : std::string("scene");
    scene.sample_rate_hz = number(require(doc, "", "sample_rate_hz"), "/sample_rate_hz");
    scene.duration_s = number(require(doc, "", "duration_s"), "/duration_s");
    if (!(scene.duration_s > 0.0)) fail_at(ErrorCode::config, "/duration_s", "must be > 0");
    if (!(scene.sample_rate_hz >= 50.0 && scene.sample_rate_hz <= 1000.0))
        fail_at(ErrorCode::config, "/sample_rate_hz", "must be in [50, 1000]");
    if (doc.contains("seed")) {
        const json& s = doc["seed"];
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            fail_at(ErrorCode::config, "/seed", "expected a non-negative integer");
        scene.seed = s.get<std::uint64_t>();
    }
    if (doc.contains("separable")) {
        if (!doc["separable"].is_boolean()) fail_at(ErrorCode::config, "/separable", "expected true or false");
        scene.separable = doc["separable"].get<bool>();
    }

    if (doc.contains("geometry")) {
        check_keys(doc["geometry"], "/geometry", {"d0_m"});
        scene.geometry.separation_m = number_or(doc["geometry"], "/geometry", "d0_m", scene.geometry.separation_m);
    }
    if (!(scene.geometry.separation_m > 0.0)) fail_at(ErrorCode::config, "/geometry/d0_m", "must be > 0");

    if (doc.contains("los")) {
        check_keys(doc["los"], "/los", {"magnitude", "phase_rad"});
        scene.los_gain = complex_gain(doc["los"], "/los", 1.0);
    }

    if (doc.contains("reflectors")) {
        const json& list = doc["reflectors"];
        if (!list.is_array()) fail_at(ErrorCode::config, "/reflectors", "expected an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string p = "/reflectors/" + std::to_string(i);
            check_keys(list[i], p,
                       {"relative_delay_taps", "relative_delay_s", "relative_path_m", "range_m", "magnitude",
                        "phase_rad"});
            PathSpec path;
            path.delay_s = relative_delay(list[i], p, "", sys, scene.geometry);
            path.gain = complex_gain(list[i], p, 0.1);
            scene.reflectors.push_back(path);
        }
    }

    if (doc.contains("targets")) {
        const json& list = doc["targets"];
        if (!list.is_array()) fail_at(ErrorCode::config, "/targets", "expected an array");
        for (std::size_t i = 0; i < list.size(); ++i)
            scene.targets.push_back(parse_target(list[i], "/targets/" + std::to_string(i), sys, scene));
    }

    scene.distortion = DistortionPolicy::defaults(sys);
    if (doc.contains("distortion")) {
        const json& d = doc["distortion"];
        check_keys(d, "/distortion", {"enabled", "beta", "theta_rad", "epsilon_taps"});
        if (d.contains("enabled")) {
            if (!d["enabled"].is_boolean()) fail_at(ErrorCode::config, "/distortion/enabled", "expected true or false");
            scene.distortion_enabled = d["enabled"].get<bool>();
        } else {
            scene.distortion_enabled = true;
        }
        if (d.contains("beta")) {
            std::tie(scene.distortion.beta_min, scene.distortion.beta_max) = range_pair(d["beta"], "/distortion/beta");
            if (!(scene.distortion.beta_min > 0.0)) fail_at(ErrorCode::config, "/distortion/beta", "must be > 0");
        }
        if (d.contains("theta_rad"))
            std::tie(scene.distortion.theta_min, scene.distortion.theta_max) =
                range_pair(d["theta_rad"], "/distortion/theta_rad");
        if (d.contains("epsilon_taps")) {
            const auto [lo, hi] = range_pair(d["epsilon_taps"], "/distortion/epsilon_taps");
            scene.distortion.epsilon_min_s = lo * sys.sample_interval_s();
            scene.distortion.epsilon_max_s = hi * sys.sample_interval_s();
        }
    }

    if (doc.contains("noise")) {
        const json& n = doc["noise"];
        check_keys(n, "/noise", {"ssnr_db", "std"});
        if (n.contains("ssnr_db") == n.contains("std"))
            fail_at(ErrorCode::config, "/noise", "give exactly one of ssnr_db or std");
        if (n.contains("std")) {
            scene.noise_std = number(n["std"], "/noise/std");
            if (!(scene.noise_std >= 0.0)) fail_at(ErrorCode::config, "/noise/std", "must be >= 0");
        } else {
            const double ssnr = number(n["ssnr_db"], "/noise/ssnr_db");
            if (scene.targets.empty())
                fail_at(ErrorCode::config, "/noise/ssnr_db", "needs a target to reference (use std instead)");
            out.ssnr_db = ssnr;
            scene.noise_std = noise_std_for_ssnr(std::abs(scene.targets.front().gain.gain), ssnr);
        }
    }

    try {
        scene.validate();
    } catch (const Error& e) {
        fail_at(ErrorCode::config, "", e.what());
    }
    return out;
}

}  // namespace

SceneFile parse_scene(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::config, source + ": " + e.what());
    }
    try {
        return parse_document(doc);
    } catch (const Error& e) {
        throw Error(e.code(), source + ": " + e.what());
    }
}

SceneFile load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::config, "cannot open scene file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scene(buffer.str(), path.string());
}

SystemConfig parse_system(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::config, std::string("system: ") + e.what());
    }
    return detail::system_from_json(doc, "");
}

}  // namespace cirsense
