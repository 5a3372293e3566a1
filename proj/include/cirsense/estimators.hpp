#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cirsense/domino.hpp"
#include "cirsense/dylign.hpp"
#include "cirsense/types.hpp"

namespace cirsense {

struct RespirationOptions {
    double smoothing_s = 0.25;
    double band_low_hz = 0.1;
    double band_high_hz = 0.7;
    double detection_margin_db = 6.0;
    int oversample = 8;
    /// Prefer the subharmonic when it holds at least this fraction of the peak
    /// power (a large chest excursion puts energy at twice the breathing rate).
    /// Zero disables the check.
    double octave_ratio = 0.3;
};

struct RespirationSpectrum {
    std::vector<double> freq_hz;
    std::vector<double> power;  // P(f) + P(-f) of the windowed, smoothed signal
    double band_low_hz = 0.0;   // lower edge actually searched
    double peak_hz = 0.0;
    double bpm = 0.0;
    double peak_to_median_db = 0.0;
    bool detected = false;
};

/// Spectrum and peak of the motion signal. Never throws for a missing peak;
/// check `detected`. Windows shorter than two periods of band_low_hz search
/// from 2 / duration instead.
RespirationSpectrum analyze_respiration(std::span<const cplx> motion_signal, double sample_rate_hz,
                                        const RespirationOptions& options = {});

/// Breathing rate in bpm. Throws Error(no_respiration) when no in-band peak
/// stands out from the median by the detection margin.
double respiration_rate(std::span<const cplx> motion_signal, double sample_rate_hz,
                        const RespirationOptions& options = {});

/// Total reflected path length c * tau_est + d0.
double target_distance(double relative_delay_s, const SystemConfig& cfg, double d0_m);
double target_distance(const AlignmentResult& result, const SystemConfig& cfg, double d0_m);

/// Half the excess path, (L - d0) / 2.
double excess_half_path(double path_length_m, double d0_m);
/// Distance from the baseline midpoint for a target on the perpendicular bisector.
double bisector_range(double path_length_m, double d0_m);

struct NoiseFloor {
    std::optional<double> tap_noise;         // per-tap noise variance sigma^2[n]
    std::optional<double> subcarrier_noise;  // per-subcarrier noise variance
};

struct SsnrReport {
    double target_power = 0.0;
    double noise_power = 0.0;
    double ratio_db = 0.0;
    double unaligned_ratio_db = 0.0;  // same tap before the fractional shift
    double subcarrier_target_power = 0.0;
    double subcarrier_noise_power = 0.0;
    double per_subcarrier_ratio_db = 0.0;
    int best_subcarrier = 0;
    bool coherence_corrected = false;
    std::string noise_source;  // "supplied" or "estimated"
};

/// Target-to-noise power ratio on the aligned tap and on the strongest subcarrier of the
/// clean spectra. Unsupplied noise floors are estimated: taps from the median
/// variance of candidate taps under the gate (away from the target), subcarriers
/// from first differences. With true_coherence the target power is divided by
/// (1 - |mu|^2). Throws Error(invariant) when no motion-free tap is available
/// and no floor is supplied.
SsnrReport ssnr_report(const DominoResult& clean, const AlignmentResult& alignment, const NoiseFloor& noise = {},
                       std::optional<double> true_coherence = std::nullopt, const GateOptions& gate = {},
                       const SearchSpec& spec = {});

double power_db(double ratio);

enum class SensingMode { respiration, distance, dual, multi };

std::string to_string(SensingMode mode);
/// Throws Error(config) for unknown names.
SensingMode parse_sensing_mode(const std::string& name);

struct SensingResult {
    SensingMode mode = SensingMode::dual;
    std::optional<double> respiration_bpm;
    std::optional<double> distance_m;
    double ssnr_db = 0.0;
    int target_id = 0;
    double window_start_s = 0.0;
    double window_end_s = 0.0;
};

}  // namespace cirsense
