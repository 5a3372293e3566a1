#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace cirsense {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kLightSpeed = 299792458.0;

/// OFDM system constants. Sample interval and subcarrier spacing are derived
/// from the bandwidth and DFT size so their invariants hold by construction.
struct SystemConfig {
    double carrier_freq_hz = 5.25e9;
    double bandwidth_hz = 160e6;
    int dft_size = 512;
    std::vector<int> active_subcarriers;  // ascending, each in [-N/2, N/2-1]
    std::vector<int> tap_set;             // ascending and contiguous
    double light_speed_mps = kLightSpeed;

    double sample_interval_s() const { return 1.0 / bandwidth_hz; }
    double subcarrier_spacing_hz() const { return bandwidth_hz / dft_size; }
    double wavelength_m() const { return light_speed_mps / carrier_freq_hz; }
    /// Path length covered by one tap (c * T_s).
    double tap_length_m() const { return light_speed_mps * sample_interval_s(); }
    int tap_min() const { return tap_set.front(); }
    int tap_max() const { return tap_set.back(); }

    /// Throws Error(config) when any invariant is violated.
    void validate() const;

    /// 5.25 GHz / 160 MHz / N=512 with the default 802.11ax-like occupancy and
    /// taps {-20, ..., 50}.
    static SystemConfig wifi_160mhz();
};

/// {-edge, ..., -dc_guard} U {dc_guard, ..., edge}.
std::vector<int> symmetric_subcarriers(int edge, int dc_guard);
std::vector<int> contiguous_range(int first, int last);

struct CsiFrame {
    double timestamp_s = 0.0;
    std::vector<cplx> values;  // ordered like SystemConfig::active_subcarriers
};

/// Time-ordered CSI frames stored column-wise: values(k, t).
struct CsiSeries {
    std::vector<int> subcarriers;
    int dft_size = 0;
    double sample_rate_hz = 0.0;
    std::vector<double> timestamps;
    Eigen::MatrixXcd values;

    std::size_t frame_count() const { return timestamps.size(); }
    std::size_t subcarrier_count() const { return subcarriers.size(); }
    CsiFrame frame(std::size_t t) const;
    void push_back(const CsiFrame& frame);
};

/// Recovered taps over (tap x time); row r holds tap index tap_offset + r.
struct CirSeries {
    int tap_offset = 0;
    double sample_rate_hz = 0.0;
    std::vector<double> timestamps;
    Eigen::MatrixXcd taps;

    std::size_t frame_count() const { return timestamps.size(); }
    int tap_count() const { return static_cast<int>(taps.rows()); }
    int tap_last() const { return tap_offset + tap_count() - 1; }
    bool has_tap(int tap) const { return tap >= tap_offset && tap <= tap_last(); }
    auto tap(int index) const { return taps.row(index - tap_offset); }
    auto tap(int index) { return taps.row(index - tap_offset); }
};

/// Half-open frame range [begin, end). end == 0 means "to the last frame".
struct FrameWindow {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t resolved_end(std::size_t frames) const { return end == 0 ? frames : end; }
    std::size_t length(std::size_t frames) const { return resolved_end(frames) - begin; }
};

}  // namespace cirsense
