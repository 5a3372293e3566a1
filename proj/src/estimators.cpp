#include "cirsense/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "cirsense/error.hpp"

namespace cirsense {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    const double upper = *mid;
    return 0.5 * (upper + *std::max_element(v.begin(), mid));
}

// |sum_t y[t] e^{-j 2 pi f t / fs}|^2 by phasor recurrence, renormalized periodically.
double dtft_power(const std::vector<cplx>& y, double f, double fs) {
    const cplx step = std::polar(1.0, -2.0 * kPi * f / fs);
    cplx rot{1.0, 0.0};
    cplx acc{};
    for (std::size_t t = 0; t < y.size(); ++t) {
        acc += y[t] * rot;
        rot *= step;
        if ((t & 1023U) == 1023U) rot = std::polar(1.0, -2.0 * kPi * f * static_cast<double>(t + 1) / fs);
    }
    return std::norm(acc);
}

// Smoothed, windowed, mean-removed signal.
std::vector<cplx> condition(std::span<const cplx> x, double fs, double smoothing_s) {
    cplx mean{};
    for (const cplx& v : x) mean += v;
    mean /= static_cast<double>(x.size());

    const auto len = static_cast<std::size_t>(std::max(1.0, std::round(smoothing_s * fs)));
    std::vector<cplx> y;
    if (len >= x.size()) throw Error(ErrorCode::config, "motion signal is shorter than the smoothing window");
    y.reserve(x.size() - len + 1);
    cplx running{};
    for (std::size_t t = 0; t < x.size(); ++t) {
        running += x[t] - mean;
        if (t >= len) running -= x[t - len] - mean;
        if (t + 1 >= len) y.push_back(running / static_cast<double>(len));
    }
    const std::size_t n = y.size();
    for (std::size_t t = 0; t < n; ++t)
        y[t] *= 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(t) / static_cast<double>(n - 1));
    return y;
}

struct Peak {
    std::size_t index = 0;
    double freq = 0.0;
};

// Parabolic vertex around index i of a uniformly spaced spectrum.
double interpolate(const RespirationSpectrum& s, std::size_t i) {
    const double df = s.freq_hz[1] - s.freq_hz[0];
    if (i == 0 || i + 1 >= s.power.size()) return s.freq_hz[i];
    const double a = s.power[i - 1];
    const double b = s.power[i];
    const double c = s.power[i + 1];
    const double denom = a - 2.0 * b + c;
    if (!(denom < 0.0)) return s.freq_hz[i];
    return s.freq_hz[i] + df * std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
}

}  // namespace

RespirationSpectrum analyze_respiration(std::span<const cplx> motion_signal, double sample_rate_hz,
                                        const RespirationOptions& options) {
    if (!(sample_rate_hz > 0.0)) throw Error(ErrorCode::config, "sample rate must be positive");
    if (!(options.band_low_hz > 0.0 && options.band_high_hz > options.band_low_hz))
        throw Error(ErrorCode::config, "respiration band must satisfy 0 < low < high");
    if (options.oversample < 1) throw Error(ErrorCode::config, "oversample must be at least 1");
    if (options.band_high_hz >= sample_rate_hz / 2.0)
        throw Error(ErrorCode::config, "respiration band exceeds the Nyquist frequency");
    if (motion_signal.size() < 8) throw Error(ErrorCode::config, "motion signal is too short");

    const std::vector<cplx> y = condition(motion_signal, sample_rate_hz, options.smoothing_s);
    const double duration = static_cast<double>(motion_signal.size()) / sample_rate_hz;

    RespirationSpectrum s;
    s.band_low_hz = std::max(options.band_low_hz, 2.0 / duration);
    if (s.band_low_hz >= options.band_high_hz) return s;

    const double df = sample_rate_hz / (static_cast<double>(y.size()) * options.oversample);
    // one guard bin on each side so the band edges can be interpolated
    const auto first = static_cast<long>(std::floor(s.band_low_hz / df)) - 1;
    const auto last = static_cast<long>(std::ceil(options.band_high_hz / df)) + 1;
    for (long i = std::max(first, 0L); i <= last; ++i) {
        const double f = static_cast<double>(i) * df;
        s.freq_hz.push_back(f);
        s.power.push_back(dtft_power(y, f, sample_rate_hz) + dtft_power(y, -f, sample_rate_hz));
    }

    std::vector<double> in_band;
    std::size_t best = 0;
    double best_power = -1.0;
    for (std::size_t i = 0; i < s.freq_hz.size(); ++i) {
        if (s.freq_hz[i] < s.band_low_hz || s.freq_hz[i] > options.band_high_hz) continue;
        in_band.push_back(s.power[i]);
        if (s.power[i] > best_power) {
            best_power = s.power[i];
            best = i;
        }
    }
    if (in_band.empty() || best_power <= 0.0) return s;
    const double floor = median(in_band);
    s.peak_to_median_db = floor > 0.0 ? 10.0 * std::log10(best_power / floor) : HUGE_VAL;
    s.detected = s.peak_to_median_db >= options.detection_margin_db;
    s.peak_hz = interpolate(s, best);

    if (s.detected && options.octave_ratio > 0.0 && s.peak_hz / 2.0 >= s.band_low_hz) {
        const double half = s.peak_hz / 2.0;
        const auto centre = static_cast<std::size_t>(std::lround((half - s.freq_hz.front()) / df));
        std::size_t sub = centre;
        for (std::size_t i = centre > 0 ? centre - 1 : 0; i <= std::min(centre + 1, s.power.size() - 1); ++i)
            if (s.power[i] > s.power[sub]) sub = i;
        const bool local_max = sub > 0 && sub + 1 < s.power.size() && s.power[sub] >= s.power[sub - 1] &&
                               s.power[sub] >= s.power[sub + 1];
        if (local_max && s.power[sub] >= options.octave_ratio * best_power &&
            10.0 * std::log10(s.power[sub] / floor) >= options.detection_margin_db)
            s.peak_hz = interpolate(s, sub);
    }
    s.bpm = 60.0 * s.peak_hz;
    return s;
}

double respiration_rate(std::span<const cplx> motion_signal, double sample_rate_hz,
                        const RespirationOptions& options) {
    const RespirationSpectrum s = analyze_respiration(motion_signal, sample_rate_hz, options);
    if (!s.detected)
        throw Error(ErrorCode::no_respiration,
                    "no respiration detected (peak " + std::to_string(s.peak_to_median_db) + " dB above median)");
    return s.bpm;
}

double target_distance(double relative_delay_s, const SystemConfig& cfg, double d0_m) {
    if (!(d0_m > 0.0)) throw Error(ErrorCode::config, "transceiver separation must be positive");
    if (relative_delay_s < 0.0)
        throw Error(ErrorCode::invariant, "negative relative delay " + std::to_string(relative_delay_s) + " s");
    return cfg.light_speed_mps * relative_delay_s + d0_m;
}

double target_distance(const AlignmentResult& result, const SystemConfig& cfg, double d0_m) {
    return target_distance(result.relative_delay_s(cfg.sample_interval_s()), cfg, d0_m);
}

double excess_half_path(double path_length_m, double d0_m) { return 0.5 * (path_length_m - d0_m); }

double bisector_range(double path_length_m, double d0_m) {
    const double half = 0.5 * path_length_m;
    const double base = 0.5 * d0_m;
    return half > base ? std::sqrt(half * half - base * base) : 0.0;
}

double power_db(double ratio) { return 10.0 * std::log10(std::max(ratio, 1e-300)); }

SsnrReport ssnr_report(const DominoResult& clean, const AlignmentResult& alignment, const NoiseFloor& noise,
                       std::optional<double> true_coherence, const GateOptions& gate, const SearchSpec& spec) {
    SsnrReport r;
    const FrameWindow window = alignment.window;
    const std::size_t begin = window.begin;
    const std::size_t end = window.resolved_end(clean.clean_csi.frame_count());
    if (end <= begin + 1 || end > clean.clean_csi.frame_count())
        throw Error(ErrorCode::config, "alignment window does not fit the clean channel");

    const std::vector<double>& profile = alignment.variance_profile;
    const int offset = alignment.profile_tap_offset;
    if (noise.tap_noise) {
        r.noise_power = *noise.tap_noise;
        r.noise_source = "supplied";
    } else {
        std::vector<double> candidates;
        for (int n = spec.candidate_first; n <= spec.candidate_last; ++n) {
            const int row = n - offset;
            if (row < 0 || row >= static_cast<int>(profile.size())) continue;
            candidates.push_back(profile[static_cast<std::size_t>(row)]);
        }
        const double gate_level = gate.variance_ratio * median(candidates);
        std::vector<double> quiet;
        for (int n = spec.candidate_first; n <= spec.candidate_last; ++n) {
            const int row = n - offset;
            if (row < 0 || row >= static_cast<int>(profile.size()) || n == 0) continue;
            if (std::abs(n - alignment.tap_index) <= 2) continue;
            const double v = profile[static_cast<std::size_t>(row)];
            if (v < gate_level) quiet.push_back(v);
        }
        if (quiet.empty()) throw Error(ErrorCode::invariant, "no motion-free taps to estimate the noise floor");
        r.noise_power = median(quiet);
        r.noise_source = "estimated";
    }

    double scale = 1.0;
    if (true_coherence) {
        scale = 1.0 - std::clamp(*true_coherence, 0.0, 1.0);
        if (scale <= 0.0) throw Error(ErrorCode::invariant, "coherence of 1 leaves no motion variance");
        r.coherence_corrected = true;
    }
    r.target_power = std::max(alignment.aligned_variance - r.noise_power, 0.0) / scale;
    r.ratio_db = power_db(r.target_power / r.noise_power);
    r.unaligned_ratio_db = power_db(std::max(alignment.unshifted_variance - r.noise_power, 0.0) / scale / r.noise_power);

    const auto block = clean.clean_csi.values.middleCols(static_cast<Eigen::Index>(begin),
                                                         static_cast<Eigen::Index>(end - begin));
    const Eigen::VectorXcd mean = block.rowwise().mean();
    const Eigen::VectorXd variance = (block.colwise() - mean).cwiseAbs2().rowwise().mean();
    Eigen::Index best = 0;
    variance.maxCoeff(&best);
    r.best_subcarrier = clean.clean_csi.subcarriers[static_cast<std::size_t>(best)];
    if (noise.subcarrier_noise) {
        r.subcarrier_noise_power = *noise.subcarrier_noise;
    } else {
        const Eigen::Index w = block.cols();
        const Eigen::VectorXd diff =
            (block.rightCols(w - 1) - block.leftCols(w - 1)).cwiseAbs2().rowwise().mean() / 2.0;
        r.subcarrier_noise_power = median(std::vector<double>(diff.begin(), diff.end()));
    }
    r.subcarrier_target_power = std::max(variance(best) - r.subcarrier_noise_power, 0.0) / scale;
    r.per_subcarrier_ratio_db = power_db(r.subcarrier_target_power / r.subcarrier_noise_power);
    return r;
}

std::string to_string(SensingMode mode) {
    switch (mode) {
        case SensingMode::respiration: return "respiration";
        case SensingMode::distance: return "distance";
        case SensingMode::dual: return "dual";
        case SensingMode::multi: return "multi";
    }
    return "unknown";
}

SensingMode parse_sensing_mode(const std::string& name) {
    if (name == "respiration") return SensingMode::respiration;
    if (name == "distance") return SensingMode::distance;
    if (name == "dual") return SensingMode::dual;
    if (name == "multi" || name == "multi-target") return SensingMode::multi;
    throw Error(ErrorCode::config, "unknown mode '" + name + "' (respiration, distance, dual, multi)");
}

}  // namespace cirsense
