#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cirsense/types.hpp"

namespace cirsense {

struct PathSpec {
    cplx gain{1.0, 0.0};
    double delay_s = 0.0;
};

/// Per-frame hardware distortion shared by every path of the frame:
/// magnitude gain (AGC), common phase offset and common delay shift.
struct DistortionState {
    double mag_gain = 1.0;
    double phase_offset_rad = 0.0;
    double delay_shift_s = 0.0;

    bool operator==(const DistortionState&) const = default;
};

/// Ranges for randomized distortions. beta is drawn log-uniformly, theta and
/// epsilon uniformly. A degenerate range (min == max) always yields min.
struct DistortionPolicy {
    double beta_min = 0.5;
    double beta_max = 2.0;
    double theta_min = 0.0;
    double theta_max = 2.0 * kPi;
    double epsilon_min_s = 0.0;
    double epsilon_max_s = 0.0;

    /// Defaults with epsilon in [-2 T_s, 2 T_s].
    static DistortionPolicy defaults(const SystemConfig& cfg);
    static DistortionPolicy identity();
};

using Rng = std::mt19937_64;

/// Independent, reproducible stream for (seed, stream, index).
Rng stream_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

DistortionState draw_distortion(std::uint64_t seed, const DistortionPolicy& policy, std::uint64_t frame_index);
std::vector<DistortionState> distortion_sampler(std::uint64_t seed, const DistortionPolicy& policy,
                                                std::size_t count);

/// One CSI frame: beta e^{-j theta} / sqrt(N) * sum_l alpha_l e^{-j 2 pi (f_c + k df)(tau_l + eps)}
/// plus circular Gaussian noise with per-component standard deviation noise_std.
/// Throws Error(config) when a delay falls outside the tap span.
CsiFrame synth_csi_frame(const SystemConfig& cfg, std::span<const PathSpec> paths,
                         const DistortionState& distortion, double noise_std, Rng* rng = nullptr,
                         double timestamp_s = 0.0);

/// Transmitter and receiver separated by separation_m; targets sit on the
/// perpendicular bisector at `range` from the baseline midpoint.
struct BistaticGeometry {
    double separation_m = 0.6;

    double path_length(double range_m) const;
    double relative_path(double range_m) const { return path_length(range_m) - separation_m; }
    /// Inverse of relative_path; relative path lengths must be >= 0.
    double range_for_relative_path(double relative_path_m) const;
};

enum class MotionKind { stationary, respiration, linear_sweep };

std::string to_string(MotionKind kind);

struct MotionTrajectory {
    MotionKind kind = MotionKind::stationary;
    double base_delay_s = 0.0;  // relative delay at rest (stationary, respiration)
    double amplitude_m = 0.0;   // chest displacement amplitude
    double rate_hz = 0.0;
    double phase_rad = 0.0;
    double sweep_start_m = 0.0;  // bisector range at t = 0 (linear_sweep)
    double sweep_end_m = 0.0;
    double duration_s = 0.0;

    double range_at(double t, const BistaticGeometry& geometry, double light_speed) const;
    void validate() const;
};

enum class GainDecay { constant, inverse_distance };

/// Dynamic-path gain: `gain` at t = 0, optionally scaled by path(0)/path(t).
struct GainModel {
    cplx gain{0.05, 0.0};
    GainDecay decay = GainDecay::constant;
};

struct MovingTarget {
    MotionTrajectory trajectory;
    GainModel gain;
};

struct SceneSpec {
    std::string name;
    BistaticGeometry geometry;
    /// Static paths with delays relative to the LoS; the LoS itself is added
    /// with gain los_gain at delay separation/c.
    cplx los_gain{1.0, 0.0};
    std::vector<PathSpec> reflectors;
    std::vector<MovingTarget> targets;
    double sample_rate_hz = 200.0;
    double duration_s = 30.0;
    bool distortion_enabled = false;
    DistortionPolicy distortion;
    double noise_std = 0.0;
    std::uint64_t seed = 1;
    bool separable = false;

    double los_delay_s(double light_speed) const { return geometry.separation_m / light_speed; }
    std::size_t frame_count() const;
    void validate() const;
};

/// Per-frame truth recorded by the simulator. Target-indexed arrays are [target][frame].
struct GroundTruth {
    double separation_m = 0.0;
    double los_delay_s = 0.0;
    std::vector<double> timestamps;
    std::vector<DistortionState> distortions;
    std::vector<MotionTrajectory> trajectories;
    std::vector<std::vector<double>> relative_delay_s;
    std::vector<std::vector<double>> range_m;
    std::vector<std::vector<cplx>> gains;

    std::size_t target_count() const { return relative_delay_s.size(); }
    double mean_relative_delay(std::size_t target, FrameWindow window = {}) const;
    /// |mean_t e^{-j 2 pi f_c tau'[t]}|^2 over the window.
    double coherence(std::size_t target, double carrier_freq_hz, FrameWindow window = {}) const;
};

struct SyntheticTrace {
    CsiSeries csi;
    GroundTruth truth;
};

/// Every path (LoS, reflectors, targets) at every sample instant, with
/// per-frame distortion and noise streams derived from scene.seed.
SyntheticTrace synth_scene(const SystemConfig& cfg, const SceneSpec& scene);

/// Per-component noise std giving a tap-domain SSNR of ssnr_db for a path of
/// magnitude |gain| on the grid: |gain|^2 / (2 std^2).
double noise_std_for_ssnr(double gain_magnitude, double ssnr_db);

}  // namespace cirsense
