#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "cirsense/channel_model.hpp"
#include "cirsense/types.hpp"

namespace cirsense {

/// Binary CSI trace: "CIRS1", uint32 LE header length, JSON header, then per
/// frame a float64 timestamp and |K| (float32 re, float32 im) pairs. All
/// values little-endian.
struct TraceHeader {
    SystemConfig system;
    double sample_rate_hz = 0.0;
    std::size_t frame_count = 0;
    double d0_m = 0.0;
    std::string scene_name;
};

struct Trace {
    TraceHeader header;
    CsiSeries csi;
};

void write_trace(std::ostream& out, const TraceHeader& header, const CsiSeries& csi);
void write_trace(const std::filesystem::path& path, const TraceHeader& header, const CsiSeries& csi);
/// Throws Error(input_format) on a bad magic, header or truncated payload.
Trace read_trace(std::istream& in);
Trace read_trace(const std::filesystem::path& path);

/// CIR dump: "CIRT1", uint32 LE header length, JSON header with tap_offset,
/// tap_count, frame_count and sample_rate_hz, then per frame a float64
/// timestamp and tap_count float32 pairs.
void write_cir(std::ostream& out, const CirSeries& cir);
void write_cir(const std::filesystem::path& path, const CirSeries& cir);
CirSeries read_cir(std::istream& in);
CirSeries read_cir(const std::filesystem::path& path);

/// Ground truth as JSON lines: a {"type":"scene",...} record followed by one
/// {"type":"frame",...} record per frame.
void write_ground_truth(std::ostream& out, const GroundTruth& truth, const std::string& scene_name,
                        double carrier_freq_hz);
void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth, const std::string& scene_name,
                        double carrier_freq_hz);
GroundTruth read_ground_truth(std::istream& in);
GroundTruth read_ground_truth(const std::filesystem::path& path);

/// Sibling ground-truth path used by the CLI: trace.cirs -> trace.gt.jsonl.
std::filesystem::path ground_truth_path_for(const std::filesystem::path& trace_path);

}  // namespace cirsense
