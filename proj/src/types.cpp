#include "cirsense/types.hpp"

#include <algorithm>
#include <string>

#include "cirsense/error.hpp"

namespace cirsense {

std::vector<int> symmetric_subcarriers(int edge, int dc_guard) {
    std::vector<int> out;
    for (int k = -edge; k <= -dc_guard; ++k) out.push_back(k);
    for (int k = dc_guard; k <= edge; ++k) out.push_back(k);
    return out;
}

std::vector<int> contiguous_range(int first, int last) {
    std::vector<int> out;
    for (int k = first; k <= last; ++k) out.push_back(k);
    return out;
}

SystemConfig SystemConfig::wifi_160mhz() {
    SystemConfig cfg;
    cfg.active_subcarriers = symmetric_subcarriers(250, 3);
    cfg.tap_set = contiguous_range(-20, 50);
    return cfg;
}

void SystemConfig::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::config, "system: " + msg); };
    if (!(carrier_freq_hz > 0.0)) fail("carrier_freq_hz must be > 0");
    if (!(bandwidth_hz > 0.0)) fail("bandwidth_hz must be > 0");
    if (dft_size < 2) fail("dft_size must be >= 2");
    if (!(light_speed_mps > 0.0)) fail("light_speed_mps must be > 0");
    if (active_subcarriers.empty()) fail("active_subcarriers is empty");
    if (!std::is_sorted(active_subcarriers.begin(), active_subcarriers.end()) ||
        std::adjacent_find(active_subcarriers.begin(), active_subcarriers.end()) != active_subcarriers.end())
        fail("active_subcarriers must be strictly ascending");
    if (active_subcarriers.front() < -dft_size / 2 || active_subcarriers.back() > dft_size / 2 - 1)
        fail("active_subcarriers must lie in [-N/2, N/2-1]");
    if (tap_set.empty()) fail("tap_set is empty");
    for (std::size_t i = 1; i < tap_set.size(); ++i)
        if (tap_set[i] != tap_set[i - 1] + 1) fail("tap_set must be contiguous and ascending");
    if (tap_set.size() > active_subcarriers.size())
        throw Error(ErrorCode::rank_deficient, "system: |tap_set| exceeds |active_subcarriers|");
}

CsiFrame CsiSeries::frame(std::size_t t) const {
    CsiFrame f;
    f.timestamp_s = timestamps.at(t);
    f.values.assign(values.col(static_cast<Eigen::Index>(t)).data(),
                    values.col(static_cast<Eigen::Index>(t)).data() + values.rows());
    return f;
}

void CsiSeries::push_back(const CsiFrame& frame) {
    if (frame.values.size() != subcarriers.size())
        throw Error(ErrorCode::shape, "frame length does not match the subcarrier count");
    const auto t = static_cast<Eigen::Index>(timestamps.size());
    values.conservativeResize(static_cast<Eigen::Index>(subcarriers.size()), t + 1);
    for (std::size_t k = 0; k < frame.values.size(); ++k) values(static_cast<Eigen::Index>(k), t) = frame.values[k];
    timestamps.push_back(frame.timestamp_s);
}

}  // namespace cirsense
