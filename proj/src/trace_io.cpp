#include "cirsense/trace_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "config_json.hpp"

namespace cirsense {

namespace {

using detail::json;

constexpr std::string_view kTraceMagic = "CIRS1";
constexpr std::string_view kCirMagic = "CIRT1";
constexpr std::uint32_t kMaxHeaderBytes = 64U << 20;

[[noreturn]] void bad_input(const std::string& message) { throw Error(ErrorCode::input_format, message); }

template <typename T>
void put_le(std::ostream& out, T value) {
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const char* what) {
    std::array<unsigned char, sizeof(T)> bytes;
    if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) bad_input(std::string("truncated ") + what);
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

void write_preamble(std::ostream& out, std::string_view magic, const json& header) {
    const std::string text = header.dump();
    out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

json read_preamble(std::istream& in, std::string_view magic) {
    std::string got(magic.size(), '\0');
    if (!in.read(got.data(), static_cast<std::streamsize>(got.size())) || got != magic)
        bad_input("bad magic: expected " + std::string(magic));
    const auto length = get_le<std::uint32_t>(in, "header length");
    if (length == 0 || length > kMaxHeaderBytes) bad_input("implausible header length " + std::to_string(length));
    std::string text(length, '\0');
    if (!in.read(text.data(), length)) bad_input("truncated header");
    try {
        json header = json::parse(text);
        if (!header.is_object()) bad_input("header is not a JSON object");
        return header;
    } catch (const json::parse_error& e) {
        bad_input(std::string("header: ") + e.what());
    }
}

std::size_t count_field(const json& header, const char* key) {
    const auto v = detail::integer(detail::require(header, "", key, ErrorCode::input_format), std::string("/") + key,
                                   ErrorCode::input_format);
    if (v < 0) bad_input(std::string("/") + key + ": must be >= 0");
    return static_cast<std::size_t>(v);
}

void put_complex(std::ostream& out, cplx v) {
    put_le<float>(out, static_cast<float>(v.real()));
    put_le<float>(out, static_cast<float>(v.imag()));
}

cplx get_complex(std::istream& in) {
    const auto re = get_le<float>(in, "frame payload");
    const auto im = get_le<float>(in, "frame payload");
    return {re, im};
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::config, "cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::input_format, "cannot open " + path.string());
    return in;
}

json trajectory_to_json(const MotionTrajectory& t) {
    return json{{"kind", to_string(t.kind)},     {"base_delay_s", t.base_delay_s}, {"amplitude_m", t.amplitude_m},
                {"rate_hz", t.rate_hz},          {"phase_rad", t.phase_rad},       {"sweep_start_m", t.sweep_start_m},
                {"sweep_end_m", t.sweep_end_m}, {"duration_s", t.duration_s}};
}

MotionTrajectory trajectory_from_json(const json& j, const std::string& p) {
    constexpr ErrorCode code = ErrorCode::input_format;
    MotionTrajectory t;
    const std::string kind = detail::text(detail::require(j, p, "kind", code), p + "/kind", code);
    if (kind == "static") {
        t.kind = MotionKind::stationary;
    } else if (kind == "respiration") {
        t.kind = MotionKind::respiration;
    } else if (kind == "linear_sweep") {
        t.kind = MotionKind::linear_sweep;
    } else {
        detail::fail_at(code, p + "/kind", "unknown trajectory kind '" + kind + "'");
    }
    t.base_delay_s = detail::number_or(j, p, "base_delay_s", 0.0, code);
    t.amplitude_m = detail::number_or(j, p, "amplitude_m", 0.0, code);
    t.rate_hz = detail::number_or(j, p, "rate_hz", 0.0, code);
    t.phase_rad = detail::number_or(j, p, "phase_rad", 0.0, code);
    t.sweep_start_m = detail::number_or(j, p, "sweep_start_m", 0.0, code);
    t.sweep_end_m = detail::number_or(j, p, "sweep_end_m", 0.0, code);
    t.duration_s = detail::number_or(j, p, "duration_s", 0.0, code);
    return t;
}

}  // namespace

void write_trace(std::ostream& out, const TraceHeader& header, const CsiSeries& csi) {
    if (csi.subcarriers != header.system.active_subcarriers || csi.dft_size != header.system.dft_size)
        throw Error(ErrorCode::shape, "trace header and CSI disagree on the subcarrier set");
    const json j{{"format", "CIRS1"},
                 {"version", 1},
                 {"system", detail::system_to_json(header.system)},
                 {"sample_rate_hz", header.sample_rate_hz},
                 {"frame_count", csi.frame_count()},
                 {"subcarrier_count", csi.subcarrier_count()},
                 {"d0_m", header.d0_m},
                 {"scene", header.scene_name}};
    write_preamble(out, kTraceMagic, j);
    for (std::size_t t = 0; t < csi.frame_count(); ++t) {
        put_le<double>(out, csi.timestamps[t]);
        for (Eigen::Index k = 0; k < csi.values.rows(); ++k)
            put_complex(out, csi.values(k, static_cast<Eigen::Index>(t)));
    }
    if (!out) throw Error(ErrorCode::config, "write failed");
}

void write_trace(const std::filesystem::path& path, const TraceHeader& header, const CsiSeries& csi) {
    std::ofstream out = open_out(path);
    write_trace(out, header, csi);
}

Trace read_trace(std::istream& in) {
    constexpr ErrorCode code = ErrorCode::input_format;
    const json j = read_preamble(in, kTraceMagic);
    Trace trace;
    TraceHeader& h = trace.header;
    try {
        h.system = detail::system_from_json(detail::require(j, "", "system", code), "/system", code);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::rank_deficient) throw;
        bad_input(std::string("header ") + e.what());
    }
    h.sample_rate_hz = detail::number(detail::require(j, "", "sample_rate_hz", code), "/sample_rate_hz", code);
    if (!(h.sample_rate_hz > 0.0)) bad_input("/sample_rate_hz: must be > 0");
    h.frame_count = count_field(j, "frame_count");
    if (count_field(j, "subcarrier_count") != h.system.active_subcarriers.size())
        bad_input("/subcarrier_count: disagrees with /system/subcarriers");
    h.d0_m = detail::number_or(j, "", "d0_m", 0.0, code);
    if (j.contains("scene") && j["scene"].is_string()) h.scene_name = j["scene"].get<std::string>();

    CsiSeries& csi = trace.csi;
    csi.subcarriers = h.system.active_subcarriers;
    csi.dft_size = h.system.dft_size;
    csi.sample_rate_hz = h.sample_rate_hz;
    const auto rows = static_cast<Eigen::Index>(csi.subcarriers.size());
    const std::size_t frame_bytes = sizeof(double) + csi.subcarriers.size() * 2 * sizeof(float);
    if (h.frame_count > std::numeric_limits<std::size_t>::max() / frame_bytes) bad_input("/frame_count: too large");
    csi.timestamps.resize(h.frame_count);
    csi.values.resize(rows, static_cast<Eigen::Index>(h.frame_count));
    for (std::size_t t = 0; t < h.frame_count; ++t) {
        csi.timestamps[t] = get_le<double>(in, "frame timestamp");
        if (t > 0 && !(csi.timestamps[t] > csi.timestamps[t - 1]))
            bad_input("timestamps must increase (frame " + std::to_string(t) + ")");
        for (Eigen::Index k = 0; k < rows; ++k) csi.values(k, static_cast<Eigen::Index>(t)) = get_complex(in);
    }
    if (in.peek() != std::char_traits<char>::eof()) bad_input("trailing bytes after the last frame");
    return trace;
}

Trace read_trace(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    try {
        return read_trace(in);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void write_cir(std::ostream& out, const CirSeries& cir) {
    const json j{{"format", "CIRT1"},
                 {"version", 1},
                 {"tap_offset", cir.tap_offset},
                 {"tap_count", cir.tap_count()},
                 {"frame_count", cir.frame_count()},
                 {"sample_rate_hz", cir.sample_rate_hz}};
    write_preamble(out, kCirMagic, j);
    for (std::size_t t = 0; t < cir.frame_count(); ++t) {
        put_le<double>(out, cir.timestamps[t]);
        for (Eigen::Index r = 0; r < cir.taps.rows(); ++r) put_complex(out, cir.taps(r, static_cast<Eigen::Index>(t)));
    }
    if (!out) throw Error(ErrorCode::config, "write failed");
}

void write_cir(const std::filesystem::path& path, const CirSeries& cir) {
    std::ofstream out = open_out(path);
    write_cir(out, cir);
}

CirSeries read_cir(std::istream& in) {
    constexpr ErrorCode code = ErrorCode::input_format;
    const json j = read_preamble(in, kCirMagic);
    CirSeries cir;
    cir.tap_offset = static_cast<int>(detail::integer(detail::require(j, "", "tap_offset", code), "/tap_offset", code));
    const std::size_t taps = count_field(j, "tap_count");
    const std::size_t frames = count_field(j, "frame_count");
    if (taps == 0) bad_input("/tap_count: must be > 0");
    cir.sample_rate_hz = detail::number_or(j, "", "sample_rate_hz", 0.0, code);
    cir.timestamps.resize(frames);
    cir.taps.resize(static_cast<Eigen::Index>(taps), static_cast<Eigen::Index>(frames));
    for (std::size_t t = 0; t < frames; ++t) {
        cir.timestamps[t] = get_le<double>(in, "frame timestamp");
        for (std::size_t r = 0; r < taps; ++r)
            cir.taps(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t)) = get_complex(in);
    }
    if (in.peek() != std::char_traits<char>::eof()) bad_input("trailing bytes after the last frame");
    return cir;
}

CirSeries read_cir(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    return read_cir(in);
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth, const std::string& scene_name,
                        double carrier_freq_hz) {
    json targets = json::array();
    for (const auto& t : truth.trajectories) targets.push_back(trajectory_to_json(t));
    const json scene{{"type", "scene"},
                     {"name", scene_name},
                     {"d0_m", truth.separation_m},
                     {"los_delay_s", truth.los_delay_s},
                     {"carrier_freq_hz", carrier_freq_hz},
                     {"frame_count", truth.timestamps.size()},
                     {"targets", targets}};
    out << scene.dump() << '\n';
    for (std::size_t i = 0; i < truth.timestamps.size(); ++i) {
        json per_target = json::array();
        for (std::size_t j = 0; j < truth.target_count(); ++j)
            per_target.push_back({{"relative_delay_s", truth.relative_delay_s[j][i]},
                                  {"range_m", truth.range_m[j][i]},
                                  {"gain_re", truth.gains[j][i].real()},
                                  {"gain_im", truth.gains[j][i].imag()}});
        const DistortionState& d = truth.distortions[i];
        const json frame{{"type", "frame"},
                         {"index", i},
                         {"t", truth.timestamps[i]},
                         {"beta", d.mag_gain},
                         {"theta_rad", d.phase_offset_rad},
                         {"epsilon_s", d.delay_shift_s},
                         {"targets", per_target}};
        out << frame.dump() << '\n';
    }
    if (!out) throw Error(ErrorCode::config, "write failed");
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth, const std::string& scene_name,
                        double carrier_freq_hz) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::config, "cannot write " + path.string());
    write_ground_truth(out, truth, scene_name, carrier_freq_hz);
}

GroundTruth read_ground_truth(std::istream& in) {
    constexpr ErrorCode code = ErrorCode::input_format;
    GroundTruth truth;
    std::string line;
    std::size_t line_no = 0;
    bool have_scene = false;
    std::size_t targets = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "line " + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            bad_input(where + ": " + e.what());
        }
        try {
            const std::string type = detail::text(detail::require(j, "", "type", code), "/type", code);
            if (type == "scene") {
                if (have_scene) bad_input("duplicate scene record");
                have_scene = true;
                truth.separation_m = detail::number(detail::require(j, "", "d0_m", code), "/d0_m", code);
                truth.los_delay_s = detail::number_or(j, "", "los_delay_s", 0.0, code);
                const json& list = detail::require(j, "", "targets", code);
                if (!list.is_array()) detail::fail_at(code, "/targets", "expected an array");
                for (std::size_t i = 0; i < list.size(); ++i)
                    truth.trajectories.push_back(trajectory_from_json(list[i], "/targets/" + std::to_string(i)));
                targets = truth.trajectories.size();
                truth.relative_delay_s.assign(targets, {});
                truth.range_m.assign(targets, {});
                truth.gains.assign(targets, {});
            } else if (type == "frame") {
                if (!have_scene) bad_input("frame record before the scene record");
                truth.timestamps.push_back(detail::number(detail::require(j, "", "t", code), "/t", code));
                DistortionState d;
                d.mag_gain = detail::number_or(j, "", "beta", 1.0, code);
                d.phase_offset_rad = detail::number_or(j, "", "theta_rad", 0.0, code);
                d.delay_shift_s = detail::number_or(j, "", "epsilon_s", 0.0, code);
                truth.distortions.push_back(d);
                const json& list = detail::require(j, "", "targets", code);
                if (!list.is_array() || list.size() != targets)
                    detail::fail_at(code, "/targets", "expected " + std::to_string(targets) + " entries");
                for (std::size_t i = 0; i < targets; ++i) {
                    const std::string p = "/targets/" + std::to_string(i);
                    truth.relative_delay_s[i].push_back(
                        detail::number(detail::require(list[i], p, "relative_delay_s", code), p + "/relative_delay_s", code));
                    truth.range_m[i].push_back(detail::number_or(list[i], p, "range_m", 0.0, code));
                    truth.gains[i].emplace_back(detail::number_or(list[i], p, "gain_re", 0.0, code),
                                                detail::number_or(list[i], p, "gain_im", 0.0, code));
                }
            } else {
                detail::fail_at(code, "/type", "unknown record type '" + type + "'");
            }
        } catch (const Error& e) {
            throw Error(e.code(), where + ": " + e.what());
        }
    }
    if (!have_scene) bad_input("ground truth has no scene record");
    return truth;
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::input_format, "cannot open " + path.string());
    try {
        return read_ground_truth(in);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

std::filesystem::path ground_truth_path_for(const std::filesystem::path& trace_path) {
    std::filesystem::path p = trace_path;
    p.replace_extension(".gt.jsonl");
    return p;
}

}  // namespace cirsense
