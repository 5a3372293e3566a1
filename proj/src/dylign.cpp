#include "cirsense/dylign.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "cirsense/error.hpp"

namespace cirsense {

namespace {

struct WindowRange {
    Eigen::Index begin = 0;
    Eigen::Index length = 0;
};

WindowRange resolve(FrameWindow window, std::size_t frames) {
    const std::size_t end = window.resolved_end(frames);
    if (window.begin >= end || end > frames)
        throw Error(ErrorCode::config, "frame window [" + std::to_string(window.begin) + ", " + std::to_string(end) +
                                           ") is outside the " + std::to_string(frames) + "-frame trace");
    if (end - window.begin < 3) throw Error(ErrorCode::config, "frame window needs at least 3 frames");
    return {static_cast<Eigen::Index>(window.begin), static_cast<Eigen::Index>(end - window.begin)};
}

template <typename Row>
double row_variance(const Row& x) {
    const cplx mean = x.mean();
    return (x.array() - mean).abs2().sum() / static_cast<double>(x.size());
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    const double upper = *mid;
    return 0.5 * (upper + *std::max_element(v.begin(), mid));
}

std::vector<cplx> tap_series(const CirSeries& cir, int tap, WindowRange w) {
    const auto row = cir.tap(tap).segment(w.begin, w.length);
    return {row.begin(), row.end()};
}

// Valid-mode moving average of length len.
std::vector<cplx> smooth(std::span<const cplx> x, std::size_t len) {
    if (len <= 1 || len >= x.size()) return {x.begin(), x.end()};
    std::vector<cplx> out;
    out.reserve(x.size() - len + 1);
    cplx running{};
    for (std::size_t t = 0; t < x.size(); ++t) {
        running += x[t];
        if (t >= len) running -= x[t - len];
        if (t + 1 >= len) out.push_back(running / static_cast<double>(len));
    }
    return out;
}

// Smoothing length that leaves enough samples for the lagged correlation.
std::size_t effective_length(const GateOptions& gate, double fs, std::size_t frames) {
    const std::size_t len = gate_smoothing_frames(gate, fs);
    return 3 * len <= frames ? len : 1;
}

double gate_variance(std::span<const cplx> x, std::size_t len) { return complex_variance(smooth(x, len)); }

double gate_coherence(std::span<const cplx> x, std::size_t len) {
    return lagged_coherence(smooth(x, len), std::max<std::size_t>(1, len));
}

// Gate statistics over the candidate range clipped to the tap set.
struct Candidates {
    int first = 0;
    int last = 0;
    double median = 0.0;
    double floor = 0.0;
};

Candidates candidate_stats(const CirSeries& cir, const std::vector<double>& profile, const SearchSpec& spec,
                           const GateOptions& gate, WindowRange w) {
    Candidates c;
    c.first = std::max(spec.candidate_first, cir.tap_offset);
    c.last = std::min(spec.candidate_last, cir.tap_last());
    if (c.first > c.last) throw Error(ErrorCode::config, "candidate tap range does not intersect the tap set");
    std::vector<double> values;
    for (int n = c.first; n <= c.last; ++n) values.push_back(profile[static_cast<std::size_t>(n - cir.tap_offset)]);
    c.median = median(values);
    const double energy = cir.taps.middleCols(w.begin, w.length).cwiseAbs2().sum() / static_cast<double>(w.length);
    c.floor = gate.min_variance * energy;
    return c;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

bool passes(double variance, const Candidates& c, const GateOptions& gate) {
    return variance >= c.floor && variance > 0.0 && variance >= gate.variance_ratio * c.median;
}

}  // namespace

double complex_variance(std::span<const cplx> x) {
    if (x.empty()) return 0.0;
    cplx mean{};
    for (const cplx& v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double acc = 0.0;
    for (const cplx& v : x) acc += std::norm(v - mean);
    return acc / static_cast<double>(x.size());
}

double lag_one_coherence(std::span<const cplx> x) { return lagged_coherence(x, 1); }

std::size_t gate_smoothing_frames(const GateOptions& gate, double sample_rate_hz) {
    if (!(gate.smoothing_s > 0.0) || !(sample_rate_hz > 0.0)) return 1;
    return static_cast<std::size_t>(std::max(1.0, std::round(gate.smoothing_s * sample_rate_hz)));
}

std::vector<double> gate_variance_profile(const CirSeries& clean, const GateOptions& gate, FrameWindow window) {
    const WindowRange w = resolve(window, clean.frame_count());
    const std::size_t len = effective_length(gate, clean.sample_rate_hz, static_cast<std::size_t>(w.length));
    std::vector<double> out(static_cast<std::size_t>(clean.tap_count()));
    for (int r = 0; r < clean.tap_count(); ++r)
        out[static_cast<std::size_t>(r)] = gate_variance(tap_series(clean, clean.tap_offset + r, w), len);
    return out;
}

double lagged_coherence(std::span<const cplx> x, std::size_t lag) {
    if (lag == 0 || x.size() <= lag) return 0.0;
    cplx mean{};
    for (const cplx& v : x) mean += v;
    mean /= static_cast<double>(x.size());
    cplx acc{};
    double power = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const cplx d = x[t] - mean;
        power += std::norm(d);
        if (t >= lag) acc += d * std::conj(x[t - lag] - mean);
    }
    return power > 0.0 ? std::abs(acc) / power : 0.0;
}

CircleFit fit_circle(std::span<const cplx> points) {
    // x^2 + y^2 + D x + E y + F = 0 in least squares
    const auto n = static_cast<Eigen::Index>(points.size());
    if (n < 3) return {};
    cplx mean{};
    for (const cplx& p : points) mean += p;
    mean /= static_cast<double>(n);
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const cplx p = points[static_cast<std::size_t>(i)] - mean;
        a(i, 0) = p.real();
        a(i, 1) = p.imag();
        a(i, 2) = 1.0;
        b(i) = -std::norm(p);
    }
    const Eigen::Vector3d s = a.colPivHouseholderQr().solve(b);
    CircleFit fit;
    fit.center = mean + cplx(-s(0) / 2.0, -s(1) / 2.0);
    const double r2 = (s(0) * s(0) + s(1) * s(1)) / 4.0 - s(2);
    fit.radius = r2 > 0.0 ? std::sqrt(r2) : 0.0;
    return fit;
}

std::vector<double> tap_variance_profile(const CirSeries& clean, FrameWindow window) {
    const WindowRange w = resolve(window, clean.frame_count());
    std::vector<double> out(static_cast<std::size_t>(clean.tap_count()));
    for (int r = 0; r < clean.tap_count(); ++r)
        out[static_cast<std::size_t>(r)] = row_variance(clean.taps.row(r).segment(w.begin, w.length));
    return out;
}

std::vector<cplx> shifted_tap_series(const DominoResult& clean, const PartialDftOperator& op, int tap,
                                     double shift_taps, FrameWindow window) {
    const WindowRange w = resolve(window, clean.clean_csi.frame_count());
    const Eigen::RowVectorXcd y =
        op.shifted_tap_weights(tap, shift_taps) * clean.clean_csi.values.middleCols(w.begin, w.length);
    return {y.begin(), y.end()};
}

double shifted_tap_variance(const DominoResult& clean, const PartialDftOperator& op, int tap, double shift_taps,
                            FrameWindow window) {
    const WindowRange w = resolve(window, clean.clean_csi.frame_count());
    const Eigen::RowVectorXcd y =
        op.shifted_tap_weights(tap, shift_taps) * clean.clean_csi.values.middleCols(w.begin, w.length);
    return row_variance(y);
}

AlignmentResult align_at_shift(const DominoResult& clean, const PartialDftOperator& op, int tap, double shift_taps,
                               FrameWindow window) {
    if (clean.clean_csi.subcarriers != op.subcarriers() || clean.clean_csi.dft_size != op.dft_size())
        throw Error(ErrorCode::shape, "clean spectra do not match the recovery operator");
    if (tap < op.tap_offset() || tap > op.tap_last())
        throw Error(ErrorCode::config, "tap " + std::to_string(tap) + " is outside the tap set");
    const WindowRange w = resolve(window, clean.clean_csi.frame_count());
    const auto block = clean.clean_csi.values.middleCols(w.begin, w.length);

    AlignmentResult r;
    r.tap_index = tap;
    r.fractional_shift = shift_taps;
    const Eigen::RowVectorXcd y = op.shifted_tap_weights(tap, shift_taps) * block;
    r.motion_signal.assign(y.begin(), y.end());
    r.aligned_variance = row_variance(y);
    r.unshifted_variance =
        shift_taps == 0.0 ? r.aligned_variance : row_variance(Eigen::RowVectorXcd(op.shifted_tap_weights(tap, 0.0) * block));
    r.variance_profile = tap_variance_profile(clean.clean, window);
    r.profile_tap_offset = clean.clean.tap_offset;
    const CircleFit fit = fit_circle(r.motion_signal);
    r.mean_pulse_gain = fit.radius;
    if (fit.radius > 0.0) {
        const cplx mean = y.mean();
        r.coherence = std::clamp(std::norm((mean - fit.center) / fit.radius), 0.0, 1.0);
    }
    r.window = {static_cast<std::size_t>(w.begin), static_cast<std::size_t>(w.begin + w.length)};
    return r;
}

AlignmentResult align_dynamic_at(const DominoResult& clean, const PartialDftOperator& op, int tap,
                                 const SearchSpec& spec, FrameWindow window) {
    spec.validate();
    if (clean.clean_csi.subcarriers != op.subcarriers() || clean.clean_csi.dft_size != op.dft_size())
        throw Error(ErrorCode::shape, "clean spectra do not match the recovery operator");
    if (tap < op.tap_offset() || tap > op.tap_last())
        throw Error(ErrorCode::config, "tap " + std::to_string(tap) + " is outside the tap set");
    const WindowRange w = resolve(window, clean.clean_csi.frame_count());
    const auto block = clean.clean_csi.values.middleCols(w.begin, w.length);

    const auto search = coarse_to_fine_max(
        [&](int ci, int fi) {
            return row_variance(Eigen::RowVectorXcd(op.shifted_tap_weights(tap, spec.offset(ci, fi)) * block));
        },
        spec);

    AlignmentResult r = align_at_shift(clean, op, tap, search.best_offset, window);
    r.shift_curve = search.samples;
    std::sort(r.shift_curve.begin(), r.shift_curve.end(),
              [](const GridSample& a, const GridSample& b) { return a.offset_taps < b.offset_taps; });
    return r;
}

int select_dynamic_tap(const CirSeries& clean, const SearchSpec& spec, const GateOptions& gate, FrameWindow window) {
    spec.validate();
    const WindowRange w = resolve(window, clean.frame_count());
    const std::size_t len = effective_length(gate, clean.sample_rate_hz, static_cast<std::size_t>(w.length));
    const std::vector<double> profile = gate_variance_profile(clean, gate, window);
    const Candidates c = candidate_stats(clean, profile, spec, gate, w);

    int best = c.first;
    for (int n = c.first; n <= c.last; ++n)
        if (profile[static_cast<std::size_t>(n - clean.tap_offset)] >
            profile[static_cast<std::size_t>(best - clean.tap_offset)])
            best = n;
    const double peak = profile[static_cast<std::size_t>(best - clean.tap_offset)];
    if (!passes(peak, c, gate))
        throw Error(ErrorCode::no_motion, "no tap variance stands out: peak " + sci(peak) + " at tap " +
                                              std::to_string(best) + ", median " + sci(c.median));
    const double coherence = gate_coherence(tap_series(clean, best, w), len);
    if (coherence < gate.min_lag_coherence)
        throw Error(ErrorCode::no_motion, "variance at tap " + std::to_string(best) +
                                              " is temporally incoherent (lagged coherence " + sci(coherence) + ")");
    if (best == c.first || best == c.last)
        throw Error(ErrorCode::edge, "dynamic tap " + std::to_string(best) + " lies on the candidate-range boundary");
    return best;
}

AlignmentResult align_dynamic(const DominoResult& clean, const PartialDftOperator& op, const SearchSpec& spec,
                              const GateOptions& gate, FrameWindow window) {
    return align_dynamic_at(clean, op, select_dynamic_tap(clean.clean, spec, gate, window), spec, window);
}

std::vector<AlignmentResult> align_multi(const DominoResult& clean, const PartialDftOperator& op,
                                         const SearchSpec& spec, int max_targets, const GateOptions& gate,
                                         FrameWindow window) {
    spec.validate();
    if (max_targets < 1) throw Error(ErrorCode::config, "max_targets must be at least 1");
    const WindowRange w = resolve(window, clean.clean.frame_count());
    const std::size_t len = effective_length(gate, clean.clean.sample_rate_hz, static_cast<std::size_t>(w.length));
    const std::vector<double> profile = gate_variance_profile(clean.clean, gate, window);
    const Candidates c = candidate_stats(clean.clean, profile, spec, gate, w);
    const int offset = clean.clean.tap_offset;
    const auto var = [&](int n) {
        return clean.clean.has_tap(n) ? profile[static_cast<std::size_t>(n - offset)] : 0.0;
    };

    double top = 0.0;
    for (int n = c.first; n <= c.last; ++n) top = std::max(top, var(n));

    std::vector<int> candidates;
    for (int n = c.first + 1; n < c.last; ++n) {
        const double v = var(n);
        if (v < var(n - 1) || v < var(n + 1)) continue;
        if (!passes(v, c, gate) || v < gate.secondary_fraction * top) continue;
        if (gate_coherence(tap_series(clean.clean, n, w), len) < gate.min_lag_coherence) continue;
        candidates.push_back(n);
    }
    std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) { return var(a) > var(b); });

    std::vector<int> accepted;
    for (int n : candidates) {
        const bool suppressed =
            std::any_of(accepted.begin(), accepted.end(), [n](int a) { return std::abs(a - n) <= 1; });
        if (!suppressed) accepted.push_back(n);
    }

    std::vector<AlignmentResult> out;
    std::vector<int> neighbors;
    for (int n : accepted) {
        if (static_cast<int>(out.size()) >= max_targets) break;
        AlignmentResult r = align_dynamic_at(clean, op, n, spec, window);
        const double aligned = gate_variance(r.motion_signal, len);
        const double threshold = std::max(gate.variance_ratio * c.median, gate.neighbor_fraction * aligned);
        for (int side : {-1, 1}) {
            const int m = n + side;
            if (m < c.first || m > c.last) continue;
            const double residual =
                gate_variance(shifted_tap_series(clean, op, m, r.fractional_shift, window), len);
            if (residual < threshold) continue;
            r.interference = true;
            const bool known = std::any_of(accepted.begin(), accepted.end(), [m](int a) { return a == m; }) ||
                               std::any_of(neighbors.begin(), neighbors.end(), [m](int a) { return a == m; });
            if (!known) neighbors.push_back(m);
        }
        out.push_back(std::move(r));
    }
    for (int m : neighbors) {
        if (static_cast<int>(out.size()) >= max_targets) break;
        AlignmentResult r = align_dynamic_at(clean, op, m, spec, window);
        r.interference = true;
        out.push_back(std::move(r));
    }

    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = i + 1; j < out.size(); ++j) {
            if (std::abs(out[i].delay_taps() - out[j].delay_taps()) < 2.0) out[i].interference = out[j].interference = true;
        }
    std::stable_sort(out.begin(), out.end(), [](const AlignmentResult& a, const AlignmentResult& b) {
        return a.aligned_variance > b.aligned_variance;
    });
    return out;
}

}  // namespace cirsense
