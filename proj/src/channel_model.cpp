#include "cirsense/channel_model.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <sstream>

#include "cirsense/error.hpp"
#include "cirsense/parallel.hpp"

namespace cirsense {

namespace {

constexpr std::uint64_t kDistortionStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform_in(Rng& rng, double lo, double hi) {
    if (lo == hi) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Writes the frame's |K| values into out (noise included when rng != nullptr).
void synthesize_into(const SystemConfig& cfg, std::span<const PathSpec> paths, const DistortionState& distortion,
                     double noise_std, Rng* rng, cplx* out) {
    const double ts = cfg.sample_interval_s();
    const double df = cfg.subcarrier_spacing_hz();
    const double lo = cfg.tap_min() * ts;
    const double hi = cfg.tap_max() * ts;
    const auto& ks = cfg.active_subcarriers;
    std::fill(out, out + ks.size(), cplx{});

    for (const auto& path : paths) {
        const double d = path.delay_s + distortion.delay_shift_s;
        if (d < lo - 1e-15 || d > hi + 1e-15) {
            throw Error(ErrorCode::config, "path delay " + fmt_double(path.delay_s) + " s with shift " +
                                               fmt_double(distortion.delay_shift_s) +
                                               " s falls outside the representable tap span");
        }
        const cplx step = std::polar(1.0, -2.0 * kPi * df * d);
        cplx phasor;
        int prev = INT_MIN;
        for (std::size_t i = 0; i < ks.size(); ++i) {
            if (ks[i] == prev + 1) {
                phasor *= step;
            } else {
                const double cycles = (cfg.carrier_freq_hz + ks[i] * df) * d;
                phasor = std::polar(1.0, -2.0 * kPi * (cycles - std::floor(cycles)));
            }
            prev = ks[i];
            out[i] += path.gain * phasor;
        }
    }

    const cplx common = distortion.mag_gain * std::polar(1.0, -distortion.phase_offset_rad) /
                        std::sqrt(static_cast<double>(cfg.dft_size));
    for (std::size_t i = 0; i < ks.size(); ++i) out[i] *= common;

    if (noise_std > 0.0 && rng != nullptr) {
        std::normal_distribution<double> gauss(0.0, noise_std);
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const double re = gauss(*rng);
            const double im = gauss(*rng);
            out[i] += cplx(re, im);
        }
    }
}

}  // namespace

DistortionPolicy DistortionPolicy::defaults(const SystemConfig& cfg) {
    DistortionPolicy p;
    p.epsilon_min_s = -2.0 * cfg.sample_interval_s();
    p.epsilon_max_s = 2.0 * cfg.sample_interval_s();
    return p;
}

DistortionPolicy DistortionPolicy::identity() {
    DistortionPolicy p;
    p.beta_min = p.beta_max = 1.0;
    p.theta_min = p.theta_max = 0.0;
    p.epsilon_min_s = p.epsilon_max_s = 0.0;
    return p;
}

Rng stream_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const std::uint64_t a = splitmix64(seed ^ splitmix64(stream));
    const std::uint64_t b = splitmix64(a ^ splitmix64(index + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return Rng(seq);
}

DistortionState draw_distortion(std::uint64_t seed, const DistortionPolicy& policy, std::uint64_t frame_index) {
    if (!(policy.beta_min > 0.0) || policy.beta_max < policy.beta_min || policy.theta_max < policy.theta_min ||
        policy.epsilon_max_s < policy.epsilon_min_s)
        throw Error(ErrorCode::config, "distortion: invalid policy ranges");
    Rng rng = stream_rng(seed, kDistortionStream, frame_index);
    DistortionState s;
    s.mag_gain = std::exp(uniform_in(rng, std::log(policy.beta_min), std::log(policy.beta_max)));
    s.phase_offset_rad = uniform_in(rng, policy.theta_min, policy.theta_max);
    s.delay_shift_s = uniform_in(rng, policy.epsilon_min_s, policy.epsilon_max_s);
    return s;
}

std::vector<DistortionState> distortion_sampler(std::uint64_t seed, const DistortionPolicy& policy,
                                                std::size_t count) {
    std::vector<DistortionState> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = draw_distortion(seed, policy, i);
    return out;
}

CsiFrame synth_csi_frame(const SystemConfig& cfg, std::span<const PathSpec> paths, const DistortionState& distortion,
                         double noise_std, Rng* rng, double timestamp_s) {
    if (paths.empty()) throw Error(ErrorCode::config, "synth_csi_frame: no paths");
    if (!(noise_std >= 0.0)) throw Error(ErrorCode::config, "synth_csi_frame: noise_std must be >= 0");
    CsiFrame frame;
    frame.timestamp_s = timestamp_s;
    frame.values.resize(cfg.active_subcarriers.size());
    synthesize_into(cfg, paths, distortion, noise_std, rng, frame.values.data());
    return frame;
}

double BistaticGeometry::path_length(double range_m) const { return 2.0 * std::hypot(range_m, 0.5 * separation_m); }

double BistaticGeometry::range_for_relative_path(double relative_path_m) const {
    if (relative_path_m < 0.0) throw Error(ErrorCode::config, "relative path length must be >= 0");
    const double semi = 0.5 * (relative_path_m + separation_m);
    const double half = 0.5 * separation_m;
    return std::sqrt(std::max(0.0, semi * semi - half * half));
}

std::string to_string(MotionKind kind) {
    switch (kind) {
        case MotionKind::stationary: return "static";
        case MotionKind::respiration: return "respiration";
        case MotionKind::linear_sweep: return "linear_sweep";
    }
    return "unknown";
}

double MotionTrajectory::range_at(double t, const BistaticGeometry& geometry, double light_speed) const {
    switch (kind) {
        case MotionKind::linear_sweep: {
            const double s = std::clamp(t / duration_s, 0.0, 1.0);
            return sweep_start_m + (sweep_end_m - sweep_start_m) * s;
        }
        case MotionKind::respiration: {
            const double rest = geometry.range_for_relative_path(base_delay_s * light_speed);
            return rest + amplitude_m * std::sin(2.0 * kPi * rate_hz * t + phase_rad);
        }
        case MotionKind::stationary: break;
    }
    return geometry.range_for_relative_path(base_delay_s * light_speed);
}

void MotionTrajectory::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::config, "trajectory: " + msg); };
    switch (kind) {
        case MotionKind::stationary:
            if (!(base_delay_s >= 0.0)) fail("base_delay_s must be >= 0");
            break;
        case MotionKind::respiration:
            if (!(base_delay_s >= 0.0)) fail("base_delay_s must be >= 0");
            if (!(amplitude_m >= 0.001 && amplitude_m <= 0.02)) fail("amplitude_m must be in [0.001, 0.02]");
            if (!(rate_hz >= 0.1 && rate_hz <= 0.7)) fail("rate_hz must be in [0.1, 0.7]");
            break;
        case MotionKind::linear_sweep:
            if (!(sweep_start_m >= 0.0 && sweep_end_m >= 0.0)) fail("sweep ranges must be >= 0");
            if (!(duration_s > 0.0)) fail("sweep duration_s must be > 0");
            break;
    }
}

std::size_t SceneSpec::frame_count() const {
    return static_cast<std::size_t>(std::floor(duration_s * sample_rate_hz + 1e-9));
}

void SceneSpec::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::config, "scene: " + msg); };
    if (!(duration_s > 0.0)) fail("duration_s must be > 0");
    if (!(sample_rate_hz >= 50.0 && sample_rate_hz <= 1000.0)) fail("sample_rate_hz must be in [50, 1000]");
    if (!(geometry.separation_m > 0.0)) fail("separation d0_m must be > 0");
    if (!(noise_std >= 0.0)) fail("noise std must be >= 0");
    if (frame_count() == 0) fail("duration_s * sample_rate_hz yields no frames");
    for (const auto& r : reflectors)
        if (!(r.delay_s >= 0.0)) fail("reflector delays (relative to LoS) must be >= 0");
    for (const auto& t : targets) t.trajectory.validate();
}

double GroundTruth::mean_relative_delay(std::size_t target, FrameWindow window) const {
    const auto& d = relative_delay_s.at(target);
    const std::size_t end = window.resolved_end(d.size());
    double acc = 0.0;
    for (std::size_t i = window.begin; i < end; ++i) acc += d[i];
    return acc / static_cast<double>(end - window.begin);
}

double GroundTruth::coherence(std::size_t target, double carrier_freq_hz, FrameWindow window) const {
    const auto& d = relative_delay_s.at(target);
    const std::size_t end = window.resolved_end(d.size());
    cplx acc{};
    for (std::size_t i = window.begin; i < end; ++i) {
        const double cycles = carrier_freq_hz * d[i];
        acc += std::polar(1.0, -2.0 * kPi * (cycles - std::floor(cycles)));
    }
    return std::norm(acc / static_cast<double>(end - window.begin));
}

SyntheticTrace synth_scene(const SystemConfig& cfg, const SceneSpec& scene) {
    cfg.validate();
    scene.validate();
    const double c = cfg.light_speed_mps;
    const std::size_t frames = scene.frame_count();
    const std::size_t targets = scene.targets.size();

    SyntheticTrace out;
    GroundTruth& truth = out.truth;
    truth.separation_m = scene.geometry.separation_m;
    truth.los_delay_s = scene.los_delay_s(c);
    truth.timestamps.resize(frames);
    truth.distortions.resize(frames);
    truth.relative_delay_s.assign(targets, std::vector<double>(frames));
    truth.range_m.assign(targets, std::vector<double>(frames));
    truth.gains.assign(targets, std::vector<cplx>(frames));
    for (const auto& t : scene.targets) truth.trajectories.push_back(t.trajectory);

    for (std::size_t i = 0; i < frames; ++i) {
        const double t = static_cast<double>(i) / scene.sample_rate_hz;
        truth.timestamps[i] = t;
        truth.distortions[i] =
            scene.distortion_enabled ? draw_distortion(scene.seed, scene.distortion, i) : DistortionState{};
        for (std::size_t j = 0; j < targets; ++j) {
            const auto& target = scene.targets[j];
            const double range = target.trajectory.range_at(t, scene.geometry, c);
            const double path = scene.geometry.path_length(range);
            truth.range_m[j][i] = range;
            truth.relative_delay_s[j][i] = (path - scene.geometry.separation_m) / c;
            cplx gain = target.gain.gain;
            if (target.gain.decay == GainDecay::inverse_distance) {
                const double path0 = scene.geometry.path_length(target.trajectory.range_at(0.0, scene.geometry, c));
                gain *= path0 / path;
            }
            truth.gains[j][i] = gain;
        }
    }

    if (scene.separable) {
        const double ts = cfg.sample_interval_s();
        for (std::size_t a = 0; a < targets; ++a)
            for (std::size_t b = a + 1; b < targets; ++b)
                for (std::size_t i = 0; i < frames; ++i)
                    if (std::abs(truth.relative_delay_s[a][i] - truth.relative_delay_s[b][i]) < ts)
                        throw Error(ErrorCode::config, "scene: targets " + std::to_string(a) + " and " +
                                                           std::to_string(b) +
                                                           " are closer than one tap (separable mode)");
    }

    CsiSeries& csi = out.csi;
    csi.subcarriers = cfg.active_subcarriers;
    csi.dft_size = cfg.dft_size;
    csi.sample_rate_hz = scene.sample_rate_hz;
    csi.timestamps = truth.timestamps;
    csi.values.resize(static_cast<Eigen::Index>(cfg.active_subcarriers.size()), static_cast<Eigen::Index>(frames));

    parallel_for(frames, [&](std::size_t i) {
        std::vector<PathSpec> paths;
        paths.reserve(1 + scene.reflectors.size() + targets);
        paths.push_back({scene.los_gain, truth.los_delay_s});
        for (const auto& r : scene.reflectors) paths.push_back({r.gain, truth.los_delay_s + r.delay_s});
        for (std::size_t j = 0; j < targets; ++j)
            paths.push_back({truth.gains[j][i], truth.los_delay_s + truth.relative_delay_s[j][i]});
        Rng rng = stream_rng(scene.seed, kNoiseStream, i);
        synthesize_into(cfg, paths, truth.distortions[i], scene.noise_std, &rng,
                        csi.values.col(static_cast<Eigen::Index>(i)).data());
    });
    return out;
}

double noise_std_for_ssnr(double gain_magnitude, double ssnr_db) {
    return gain_magnitude / std::sqrt(2.0 * std::pow(10.0, ssnr_db / 10.0));
}

}  // namespace cirsense
