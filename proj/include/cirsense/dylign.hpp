#pragma once

#include <span>
#include <vector>

#include "cirsense/cir_recovery.hpp"
#include "cirsense/domino.hpp"
#include "cirsense/search.hpp"
#include "cirsense/types.hpp"

namespace cirsense {

/// Motion-presence gate, evaluated on moving-average smoothed taps. A tap
/// counts as moving when its smoothed variance is at least variance_ratio
/// times the median candidate variance, above an absolute floor, and
/// temporally coherent: the correlation of the smoothed series at a lag of one
/// smoothing length. White noise and per-frame random distortions fail the
/// latter.
struct GateOptions {
    double variance_ratio = 10.0;
    double min_variance = 1e-12;  // relative to the mean per-frame tap energy
    double smoothing_s = 0.25;    // 0: raw taps, lag one frame
    double min_lag_coherence = 0.3;
    /// Multi-target: secondary candidates below this fraction of the strongest are ignored.
    double secondary_fraction = 0.01;
    /// Multi-target: residual variance next to an aligned target, relative to
    /// it, above which a second target is declared within one tap.
    double neighbor_fraction = 0.1;
};

struct AlignmentResult {
    int tap_index = 0;               // n*
    double fractional_shift = 0.0;   // Delta'_opt in taps
    std::vector<cplx> motion_signal; // shifted tap n* over the window
    std::vector<double> variance_profile;
    int profile_tap_offset = 0;
    double coherence = 0.0;        // |mu|^2 estimated from a circle fit of the motion signal
    double mean_pulse_gain = 0.0;  // circle radius, |alpha' p|
    double aligned_variance = 0.0;
    double unshifted_variance = 0.0;
    std::vector<GridSample> shift_curve;
    bool interference = false;
    FrameWindow window;

    /// n* + Delta'_opt
    double delay_taps() const { return tap_index + fractional_shift; }
    double relative_delay_s(double sample_interval_s) const { return delay_taps() * sample_interval_s; }
};

/// Complex sample variance E|x - mean(x)|^2 of every tap over the window.
std::vector<double> tap_variance_profile(const CirSeries& clean, FrameWindow window = {});

double complex_variance(std::span<const cplx> x);
/// |sum x[t] conj(x[t-lag])| / sum |x[t]|^2 after mean removal.
double lagged_coherence(std::span<const cplx> x, std::size_t lag);
double lag_one_coherence(std::span<const cplx> x);

/// Moving-average length in frames for the gate at this sample rate (>= 1).
std::size_t gate_smoothing_frames(const GateOptions& gate, double sample_rate_hz);
/// Per-tap variance of the smoothed taps, as used by the gate.
std::vector<double> gate_variance_profile(const CirSeries& clean, const GateOptions& gate, FrameWindow window = {});

struct CircleFit {
    cplx center{};
    double radius = 0.0;
};
/// Algebraic least-squares circle through points in the complex plane.
CircleFit fit_circle(std::span<const cplx> points);

/// Tap `tap` of the clean channel after a further delay shift, re-recovered
/// from the shifted spectra.
std::vector<cplx> shifted_tap_series(const DominoResult& clean, const PartialDftOperator& op, int tap,
                                     double shift_taps, FrameWindow window = {});
double shifted_tap_variance(const DominoResult& clean, const PartialDftOperator& op, int tap, double shift_taps,
                            FrameWindow window = {});

/// Gate, pick the maximum-variance candidate tap and search the shift that
/// maximizes its variance. Throws Error(no_motion) on gate failure and
/// Error(edge) when n* sits on the candidate-range boundary.
AlignmentResult align_dynamic(const DominoResult& clean, const PartialDftOperator& op, const SearchSpec& spec = {},
                              const GateOptions& gate = {}, FrameWindow window = {});

/// Gate only: the maximum-variance candidate tap n*, with the same errors as align_dynamic.
int select_dynamic_tap(const CirSeries& clean, const SearchSpec& spec = {}, const GateOptions& gate = {},
                       FrameWindow window = {});

/// Alignment record for a fixed tap and shift (no search; shift_curve is empty).
AlignmentResult align_at_shift(const DominoResult& clean, const PartialDftOperator& op, int tap, double shift_taps,
                               FrameWindow window = {});

/// Shift search for a given tap, without gating.
AlignmentResult align_dynamic_at(const DominoResult& clean, const PartialDftOperator& op, int tap,
                                 const SearchSpec& spec = {}, FrameWindow window = {});

/// Up to max_targets aligned targets ordered by variance. Candidates are local
/// variance maxima passing the gate, with +-1 tap suppression. Results within
/// two taps of each other, or with strong residual motion on an adjacent tap
/// after alignment, carry interference = true.
std::vector<AlignmentResult> align_multi(const DominoResult& clean, const PartialDftOperator& op,
                                         const SearchSpec& spec, int max_targets, const GateOptions& gate = {},
                                         FrameWindow window = {});

}  // namespace cirsense
