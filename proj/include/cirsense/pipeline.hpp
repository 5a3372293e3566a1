#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cirsense/channel_model.hpp"
#include "cirsense/domino.hpp"
#include "cirsense/dylign.hpp"
#include "cirsense/error.hpp"
#include "cirsense/estimators.hpp"
#include "cirsense/types.hpp"

namespace cirsense {

struct PipelineOptions {
    SensingMode mode = SensingMode::dual;
    double window_s = 0.0;  // 0: one window over the whole trace
    double hop_s = 0.0;     // 0: non-overlapping windows
    bool domino = true;
    bool dylign = true;     // off: the gated tap is used without a fractional shift
    int max_targets = 2;    // multi mode
    DominoOptions domino_options;
    GateOptions gate;
    RespirationOptions respiration;
};

/// A per-window, per-stage failure. Runs continue past these.
struct StageError {
    std::size_t window = 0;
    std::string stage;
    ErrorCode code = ErrorCode::invariant;
    std::string message;
};

struct TargetReport {
    SensingResult result;
    AlignmentResult alignment;
    std::optional<SsnrReport> ssnr;
    std::optional<RespirationSpectrum> spectrum;
    std::optional<int> truth_target;
    std::optional<double> true_distance_m;
    std::optional<double> true_bpm;
    std::optional<double> distance_error_m;  // signed, estimate - truth
    std::optional<double> bpm_error;
};

struct WindowReport {
    std::size_t index = 0;
    FrameWindow frames;
    double start_s = 0.0;
    double end_s = 0.0;
    std::vector<TargetReport> targets;
};

struct PipelineReport {
    PipelineOptions options;
    std::string scene;
    double d0_m = 0.0;
    double sample_rate_hz = 0.0;
    std::size_t frame_count = 0;
    std::vector<double> timestamps;
    std::vector<double> per_frame_shift;
    std::vector<double> reference_tap_power;
    std::vector<std::uint8_t> domino_flags;
    std::vector<WindowReport> windows;
    std::vector<StageError> errors;

    std::size_t gate_failures() const;
    std::optional<double> mean_abs_distance_error() const;
    std::optional<double> mean_abs_bpm_error() const;
    std::optional<double> mean_ssnr_db() const;
};

/// Frame windows of window_s seconds every hop_s seconds; the trailing partial
/// window is dropped unless it is the only one.
std::vector<FrameWindow> plan_windows(std::size_t frames, double sample_rate_hz, double window_s, double hop_s);

/// recover -> domino -> dylign -> estimators over every window. Stage failures
/// inside a window become StageError records. Configuration and shape errors
/// still throw.
PipelineReport run_pipeline(const CsiSeries& csi, const SystemConfig& cfg, double d0_m,
                            const PipelineOptions& options = {}, const GroundTruth* truth = nullptr,
                            const std::string& scene_name = "");

/// results.json, windows.csv, variance_profile.csv, trajectory.csv,
/// shift_curve.csv and domino.csv under `dir`.
void write_report(const PipelineReport& report, const std::filesystem::path& dir);

/// One row per (grid point, repeat) of a parameter sweep.
struct SweepRow {
    std::size_t point = 0;
    std::vector<std::pair<std::string, std::string>> parameters;  // JSON pointer, value as JSON text
    int repeat = 0;
    std::uint64_t seed = 0;
    std::size_t windows = 0;
    std::size_t failures = 0;
    std::optional<double> mean_abs_distance_error_m;
    std::optional<double> mean_abs_bpm_error;
    std::optional<double> mean_ssnr_db;
};

struct SweepReport {
    std::vector<std::string> pointers;
    std::vector<SweepRow> rows;

    std::size_t failures() const;
};

/// Grid JSON: {"parameters": {"/json/pointer": [values, ...]}, "repeats": n,
/// "mode": m, "window_s": w, "seed": s}. The cartesian product of the values
/// is applied to the scene template; each point is synthesized and run.
/// Throws Error(config) for an empty grid or a pointer the template lacks.
SweepReport run_sweep(const std::string& grid_text, const std::string& template_text,
                      const PipelineOptions& base = {});
SweepReport run_sweep(const std::filesystem::path& grid, const std::filesystem::path& scene_template,
                      const PipelineOptions& base = {});

/// sweep.csv (every run) and sweep_summary.csv (mean over repeats per point).
void write_sweep(const SweepReport& report, const std::filesystem::path& dir);

}  // namespace cirsense
