#include "cirsense/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cirsense/cir_recovery.hpp"
#include "cirsense/parallel.hpp"
#include "cirsense/scene_config.hpp"
#include "config_json.hpp"

namespace cirsense {

namespace {

using detail::json;

std::string fmt(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

bool is_gate_failure(ErrorCode code) {
    return code == ErrorCode::no_motion || code == ErrorCode::edge || code == ErrorCode::no_respiration;
}

std::string stage_of(ErrorCode code) {
    return code == ErrorCode::no_motion || code == ErrorCode::edge ? "dylign" : "estimators";
}

bool wants_distance(SensingMode m) { return m != SensingMode::respiration; }
bool wants_respiration(SensingMode m) { return m != SensingMode::distance; }

struct WindowOutput {
    WindowReport report;
    std::vector<StageError> errors;
};

std::vector<AlignmentResult> align_window(const DominoResult& clean, const PartialDftOperator& op,
                                          const PipelineOptions& options, FrameWindow window) {
    const SearchSpec& spec = options.domino_options.search;
    std::vector<AlignmentResult> out;
    if (options.mode == SensingMode::multi) {
        out = align_multi(clean, op, spec, options.max_targets, options.gate, window);
        if (out.empty()) throw Error(ErrorCode::no_motion, "no candidate tap passes the motion gate");
        if (!options.dylign)
            for (auto& r : out) {
                const bool interference = r.interference;
                r = align_at_shift(clean, op, r.tap_index, 0.0, window);
                r.interference = interference;
            }
        return out;
    }
    if (options.dylign) {
        out.push_back(align_dynamic(clean, op, spec, options.gate, window));
    } else {
        const int tap = select_dynamic_tap(clean.clean, spec, options.gate, window);
        out.push_back(align_at_shift(clean, op, tap, 0.0, window));
    }
    return out;
}

WindowOutput process_window(const DominoResult& clean, const PartialDftOperator& op, const SystemConfig& cfg,
                            double d0_m, const PipelineOptions& options, const GroundTruth* truth, std::size_t index,
                            FrameWindow window) {
    WindowOutput out;
    WindowReport& w = out.report;
    w.index = index;
    w.frames = window;
    const auto& ts = clean.clean.timestamps;
    const double fs = clean.clean.sample_rate_hz;
    w.start_s = ts[window.begin];
    w.end_s = ts[window.end - 1] + 1.0 / fs;
    auto record = [&](const Error& e) { out.errors.push_back({index, stage_of(e.code()), e.code(), e.what()}); };

    std::vector<AlignmentResult> alignments;
    try {
        alignments = align_window(clean, op, options, window);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::no_motion && e.code() != ErrorCode::edge) throw;
        record(e);
        return out;
    }

    std::vector<bool> used(truth != nullptr ? truth->target_count() : 0, false);
    for (std::size_t i = 0; i < alignments.size(); ++i) {
        TargetReport t;
        t.alignment = std::move(alignments[i]);
        SensingResult& r = t.result;
        r.mode = options.mode;
        r.target_id = static_cast<int>(i);
        r.window_start_s = w.start_s;
        r.window_end_s = w.end_s;

        if (truth != nullptr && truth->target_count() > 0) {
            const double est = t.alignment.relative_delay_s(cfg.sample_interval_s());
            std::optional<std::size_t> best;
            double best_gap = HUGE_VAL;
            for (std::size_t j = 0; j < truth->target_count(); ++j) {
                if (used[j]) continue;
                const double gap = std::abs(truth->mean_relative_delay(j, window) - est);
                if (gap < best_gap) {
                    best_gap = gap;
                    best = j;
                }
            }
            if (best) {
                used[*best] = true;
                t.truth_target = static_cast<int>(*best);
                t.true_distance_m = cfg.light_speed_mps * truth->mean_relative_delay(*best, window) + d0_m;
                const MotionTrajectory& traj = truth->trajectories.at(*best);
                if (traj.kind == MotionKind::respiration) t.true_bpm = 60.0 * traj.rate_hz;
            }
        }

        if (wants_distance(options.mode)) {
            try {
                r.distance_m = target_distance(t.alignment, cfg, d0_m);
                if (t.true_distance_m) t.distance_error_m = *r.distance_m - *t.true_distance_m;
            } catch (const Error& e) {
                record(e);
            }
        }
        if (wants_respiration(options.mode)) {
            try {
                t.spectrum = analyze_respiration(t.alignment.motion_signal, fs, options.respiration);
                if (t.spectrum->detected) {
                    r.respiration_bpm = t.spectrum->bpm;
                    if (t.true_bpm) t.bpm_error = *r.respiration_bpm - *t.true_bpm;
                } else {
                    record(Error(ErrorCode::no_respiration,
                                 "target " + std::to_string(i) + ": no respiration detected (peak " +
                                     fmt(t.spectrum->peak_to_median_db) + " dB above median)"));
                }
            } catch (const Error& e) {
                if (e.code() != ErrorCode::config) throw;
                record(e);
            }
        }
        try {
            std::optional<double> coherence;
            if (t.truth_target) coherence = truth->coherence(static_cast<std::size_t>(*t.truth_target),
                                                             cfg.carrier_freq_hz, window);
            if (coherence && *coherence >= 1.0 - 1e-12) coherence.reset();
            t.ssnr = ssnr_report(clean, t.alignment, {}, coherence, options.gate, options.domino_options.search);
            r.ssnr_db = t.ssnr->ratio_db;
        } catch (const Error& e) {
            record(e);
        }
        w.targets.push_back(std::move(t));
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::config, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::config, "write failed: " + path.string());
}

json options_json(const PipelineOptions& o) {
    return json{{"mode", to_string(o.mode)},
                {"window_s", o.window_s},
                {"hop_s", o.hop_s},
                {"domino", o.domino},
                {"dylign", o.dylign},
                {"max_targets", o.max_targets},
                {"coarse_step_taps", o.domino_options.search.coarse_step_taps},
                {"fine_step_taps", o.domino_options.search.fine_step_taps},
                {"candidate_taps", {o.domino_options.search.candidate_first, o.domino_options.search.candidate_last}},
                {"gate_variance_ratio", o.gate.variance_ratio},
                {"smoothing_s", o.respiration.smoothing_s},
                {"band_hz", {o.respiration.band_low_hz, o.respiration.band_high_hz}}};
}

}  // namespace

std::size_t PipelineReport::gate_failures() const {
    return static_cast<std::size_t>(
        std::count_if(errors.begin(), errors.end(), [](const StageError& e) { return is_gate_failure(e.code); }));
}

namespace {

template <typename Get>
std::optional<double> mean_over_targets(const std::vector<WindowReport>& windows, Get get) {
    double acc = 0.0;
    std::size_t n = 0;
    for (const auto& w : windows)
        for (const auto& t : w.targets)
            if (const std::optional<double> v = get(t)) {
                acc += *v;
                ++n;
            }
    if (n == 0) return std::nullopt;
    return acc / static_cast<double>(n);
}

}  // namespace

std::optional<double> PipelineReport::mean_abs_distance_error() const {
    return mean_over_targets(windows, [](const TargetReport& t) -> std::optional<double> {
        if (!t.distance_error_m) return std::nullopt;
        return std::abs(*t.distance_error_m);
    });
}

std::optional<double> PipelineReport::mean_abs_bpm_error() const {
    return mean_over_targets(windows, [](const TargetReport& t) -> std::optional<double> {
        if (!t.bpm_error) return std::nullopt;
        return std::abs(*t.bpm_error);
    });
}

std::optional<double> PipelineReport::mean_ssnr_db() const {
    return mean_over_targets(windows, [](const TargetReport& t) -> std::optional<double> {
        if (!t.ssnr) return std::nullopt;
        return t.ssnr->ratio_db;
    });
}

std::vector<FrameWindow> plan_windows(std::size_t frames, double sample_rate_hz, double window_s, double hop_s) {
    if (frames == 0) throw Error(ErrorCode::config, "trace has no frames");
    if (window_s < 0.0 || hop_s < 0.0) throw Error(ErrorCode::config, "window and hop must be >= 0");
    if (window_s == 0.0) return {{0, frames}};
    const auto length = static_cast<std::size_t>(std::llround(window_s * sample_rate_hz));
    const auto hop = hop_s == 0.0 ? length : static_cast<std::size_t>(std::llround(hop_s * sample_rate_hz));
    if (length < 3) throw Error(ErrorCode::config, "window is shorter than 3 frames");
    if (hop == 0) throw Error(ErrorCode::config, "hop is shorter than one frame");
    if (length >= frames) return {{0, frames}};
    std::vector<FrameWindow> out;
    for (std::size_t begin = 0; begin + length <= frames; begin += hop) out.push_back({begin, begin + length});
    return out;
}

PipelineReport run_pipeline(const CsiSeries& csi, const SystemConfig& cfg, double d0_m,
                            const PipelineOptions& options, const GroundTruth* truth, const std::string& scene_name) {
    if (!(d0_m > 0.0)) throw Error(ErrorCode::config, "transceiver separation d0 must be > 0");
    if (options.max_targets < 1) throw Error(ErrorCode::config, "max_targets must be >= 1");
    options.domino_options.search.validate();
    if (truth != nullptr && truth->timestamps.size() != csi.frame_count())
        throw Error(ErrorCode::input_format, "ground truth has " + std::to_string(truth->timestamps.size()) +
                                                 " frames, trace has " + std::to_string(csi.frame_count()));

    const PartialDftOperator op(cfg);
    const DominoResult clean =
        options.domino ? align_dominant(csi, op, options.domino_options) : passthrough_channel(csi, op);

    PipelineReport report;
    report.options = options;
    report.scene = scene_name;
    report.d0_m = d0_m;
    report.sample_rate_hz = csi.sample_rate_hz;
    report.frame_count = csi.frame_count();
    report.timestamps = csi.timestamps;
    report.per_frame_shift = clean.per_frame_shift;
    report.reference_tap_power = clean.reference_tap_power;
    report.domino_flags = clean.flags;

    const std::vector<FrameWindow> windows =
        plan_windows(csi.frame_count(), csi.sample_rate_hz, options.window_s, options.hop_s);
    std::vector<WindowOutput> outputs(windows.size());
    parallel_for(
        windows.size(),
        [&](std::size_t i) { outputs[i] = process_window(clean, op, cfg, d0_m, options, truth, i, windows[i]); }, 1);
    for (auto& o : outputs) {
        report.windows.push_back(std::move(o.report));
        for (auto& e : o.errors) report.errors.push_back(std::move(e));
    }
    return report;
}

void write_report(const PipelineReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    json windows = json::array();
    std::ostringstream wcsv, profile, trajectory, curve, domino;
    wcsv << "window,target,start_s,end_s,tap,fractional_shift,delay_taps,distance_m,respiration_bpm,ssnr_db,"
            "subcarrier_ssnr_db,interference,true_distance_m,distance_error_m,true_bpm,bpm_error\n";
    profile << "window,tap,variance\n";
    trajectory << "window,target,t,re,im\n";
    curve << "window,target,shift_taps,variance\n";
    for (const auto& w : report.windows) {
        json targets = json::array();
        bool profile_written = false;
        for (const auto& t : w.targets) {
            const AlignmentResult& a = t.alignment;
            const SensingResult& r = t.result;
            json tj{{"target_id", r.target_id},
                    {"tap", a.tap_index},
                    {"fractional_shift_taps", a.fractional_shift},
                    {"delay_taps", a.delay_taps()},
                    {"distance_m", opt(r.distance_m)},
                    {"respiration_bpm", opt(r.respiration_bpm)},
                    {"ssnr_db", t.ssnr ? json(t.ssnr->ratio_db) : json(nullptr)},
                    {"interference", a.interference},
                    {"coherence_estimate", a.coherence},
                    {"mean_pulse_gain", a.mean_pulse_gain},
                    {"aligned_variance", a.aligned_variance},
                    {"unshifted_variance", a.unshifted_variance}};
            if (r.distance_m) {
                tj["excess_half_path_m"] = excess_half_path(*r.distance_m, report.d0_m);
                tj["bisector_range_m"] = bisector_range(*r.distance_m, report.d0_m);
            }
            if (t.ssnr) {
                const SsnrReport& s = *t.ssnr;
                tj["ssnr"] = {{"target_power", s.target_power},
                              {"noise_power", s.noise_power},
                              {"ratio_db", s.ratio_db},
                              {"unaligned_ratio_db", s.unaligned_ratio_db},
                              {"per_subcarrier_ratio_db", s.per_subcarrier_ratio_db},
                              {"best_subcarrier", s.best_subcarrier},
                              {"coherence_corrected", s.coherence_corrected},
                              {"noise_source", s.noise_source}};
            }
            if (t.spectrum) tj["respiration_peak_to_median_db"] = t.spectrum->peak_to_median_db;
            if (t.truth_target) {
                tj["truth"] = {{"target", *t.truth_target},
                               {"distance_m", opt(t.true_distance_m)},
                               {"distance_error_m", opt(t.distance_error_m)},
                               {"respiration_bpm", opt(t.true_bpm)},
                               {"bpm_error", opt(t.bpm_error)}};
            }
            targets.push_back(std::move(tj));

            wcsv << w.index << ',' << r.target_id << ',' << fmt(w.start_s) << ',' << fmt(w.end_s) << ','
                 << a.tap_index << ',' << fmt(a.fractional_shift) << ',' << fmt(a.delay_taps()) << ','
                 << fmt(r.distance_m) << ',' << fmt(r.respiration_bpm) << ','
                 << (t.ssnr ? fmt(t.ssnr->ratio_db) : std::string()) << ','
                 << (t.ssnr ? fmt(t.ssnr->per_subcarrier_ratio_db) : std::string()) << ','
                 << (a.interference ? 1 : 0) << ',' << fmt(t.true_distance_m) << ',' << fmt(t.distance_error_m) << ','
                 << fmt(t.true_bpm) << ',' << fmt(t.bpm_error) << '\n';
            if (!profile_written) {
                for (std::size_t n = 0; n < a.variance_profile.size(); ++n)
                    profile << w.index << ',' << a.profile_tap_offset + static_cast<int>(n) << ','
                            << fmt(a.variance_profile[n]) << '\n';
                profile_written = true;
            }
            for (std::size_t k = 0; k < a.motion_signal.size(); ++k)
                trajectory << w.index << ',' << r.target_id << ',' << fmt(report.timestamps[w.frames.begin + k])
                           << ',' << fmt(a.motion_signal[k].real()) << ',' << fmt(a.motion_signal[k].imag()) << '\n';
            for (const auto& s : a.shift_curve)
                curve << w.index << ',' << r.target_id << ',' << fmt(s.offset_taps) << ',' << fmt(s.value) << '\n';
        }
        windows.push_back({{"index", w.index},
                           {"start_s", w.start_s},
                           {"end_s", w.end_s},
                           {"frames", {w.frames.begin, w.frames.end}},
                           {"results", targets}});
    }

    json errors = json::array();
    for (const auto& e : report.errors)
        errors.push_back(
            {{"window", e.window}, {"stage", e.stage}, {"code", std::string(to_string(e.code))}, {"message", e.message}});

    std::size_t ambiguous = 0;
    std::size_t weak = 0;
    domino << "frame,t,per_frame_shift_taps,reference_tap_power,flags\n";
    for (std::size_t t = 0; t < report.frame_count; ++t) {
        const std::uint8_t f = report.domino_flags[t];
        ambiguous += (f & kDominanceAmbiguous) != 0 ? 1 : 0;
        weak += (f & kWeakReference) != 0 ? 1 : 0;
        domino << t << ',' << fmt(report.timestamps[t]) << ',' << fmt(report.per_frame_shift[t]) << ','
               << fmt(report.reference_tap_power[t]) << ',' << static_cast<int>(f) << '\n';
    }

    const json results{{"scene", report.scene},
                       {"d0_m", report.d0_m},
                       {"sample_rate_hz", report.sample_rate_hz},
                       {"frame_count", report.frame_count},
                       {"options", options_json(report.options)},
                       {"domino", {{"dominance_ambiguous_frames", ambiguous}, {"weak_reference_frames", weak}}},
                       {"windows", windows},
                       {"errors", errors},
                       {"summary",
                        {{"windows", report.windows.size()},
                         {"gate_failures", report.gate_failures()},
                         {"mean_abs_distance_error_m", opt(report.mean_abs_distance_error())},
                         {"mean_abs_bpm_error", opt(report.mean_abs_bpm_error())},
                         {"mean_ssnr_db", opt(report.mean_ssnr_db())}}}};

    write_text(dir / "results.json", results.dump(2) + "\n");
    write_text(dir / "windows.csv", wcsv.str());
    write_text(dir / "variance_profile.csv", profile.str());
    write_text(dir / "trajectory.csv", trajectory.str());
    write_text(dir / "shift_curve.csv", curve.str());
    write_text(dir / "domino.csv", domino.str());
}

std::size_t SweepReport::failures() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.failures;
    return n;
}

SweepReport run_sweep(const std::string& grid_text, const std::string& template_text, const PipelineOptions& base) {
    json grid;
    json scene;
    try {
        grid = json::parse(grid_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::config, std::string("grid: ") + e.what());
    }
    try {
        scene = json::parse(template_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::config, std::string("template: ") + e.what());
    }
    detail::check_keys(grid, "", {"parameters", "repeats", "mode", "window_s", "seed", "domino", "dylign"});
    const json& params = detail::require(grid, "", "parameters");
    if (!params.is_object() || params.empty()) detail::fail_at(ErrorCode::config, "/parameters", "grid is empty");

    PipelineOptions options = base;
    if (grid.contains("mode")) options.mode = parse_sensing_mode(detail::text(grid["mode"], "/mode"));
    options.window_s = detail::number_or(grid, "", "window_s", options.window_s);
    if (grid.contains("domino")) options.domino = grid["domino"].get<bool>();
    if (grid.contains("dylign")) options.dylign = grid["dylign"].get<bool>();
    const long long repeats = grid.contains("repeats") ? detail::integer(grid["repeats"], "/repeats") : 1;
    if (repeats < 1) detail::fail_at(ErrorCode::config, "/repeats", "must be >= 1");
    std::uint64_t seed = 1;
    if (grid.contains("seed")) {
        if (!grid["seed"].is_number_unsigned()) detail::fail_at(ErrorCode::config, "/seed", "expected a non-negative integer");
        seed = grid["seed"].get<std::uint64_t>();
    }

    SweepReport report;
    std::vector<std::vector<json>> values;
    for (const auto& item : params.items()) {
        const std::string p = "/parameters/" + item.key();
        if (!item.value().is_array() || item.value().empty())
            detail::fail_at(ErrorCode::config, p, "expected a non-empty array of values");
        json::json_pointer ptr;
        try {
            ptr = json::json_pointer(item.key());
        } catch (const json::exception& e) {
            detail::fail_at(ErrorCode::config, p, e.what());
        }
        if (!scene.contains(ptr)) detail::fail_at(ErrorCode::config, p, "template has no field " + item.key());
        report.pointers.push_back(item.key());
        values.emplace_back(item.value().begin(), item.value().end());
    }

    std::size_t points = 1;
    for (const auto& v : values) points *= v.size();
    struct Job {
        std::size_t point;
        int repeat;
        json scene;
        std::vector<std::pair<std::string, std::string>> parameters;
    };
    std::vector<Job> jobs;
    for (std::size_t p = 0; p < points; ++p) {
        json doc = scene;
        std::vector<std::pair<std::string, std::string>> chosen;
        std::size_t rest = p;
        for (std::size_t d = values.size(); d-- > 0;) {
            const json& v = values[d][rest % values[d].size()];
            rest /= values[d].size();
            doc[json::json_pointer(report.pointers[d])] = v;
            chosen.emplace_back(report.pointers[d], v.dump());
        }
        std::reverse(chosen.begin(), chosen.end());
        for (int r = 0; r < repeats; ++r) {
            json run = doc;
            run["seed"] = seed + static_cast<std::uint64_t>(r);
            jobs.push_back({p, r, std::move(run), chosen});
        }
    }

    report.rows.resize(jobs.size());
    parallel_for(
        jobs.size(),
        [&](std::size_t i) {
            const Job& job = jobs[i];
            const SceneFile file = parse_scene(job.scene.dump(), "point " + std::to_string(job.point));
            const SyntheticTrace trace = synth_scene(file.system, file.scene);
            const PipelineReport run = run_pipeline(trace.csi, file.system, file.scene.geometry.separation_m, options,
                                                    &trace.truth, file.scene.name);
            SweepRow& row = report.rows[i];
            row.point = job.point;
            row.parameters = job.parameters;
            row.repeat = job.repeat;
            row.seed = file.scene.seed;
            row.windows = run.windows.size();
            row.failures = run.gate_failures();
            row.mean_abs_distance_error_m = run.mean_abs_distance_error();
            row.mean_abs_bpm_error = run.mean_abs_bpm_error();
            row.mean_ssnr_db = run.mean_ssnr_db();
        },
        1);
    return report;
}

SweepReport run_sweep(const std::filesystem::path& grid, const std::filesystem::path& scene_template,
                      const PipelineOptions& base) {
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p);
        if (!in) throw Error(ErrorCode::config, "cannot open " + p.string());
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    };
    return run_sweep(slurp(grid), slurp(scene_template), base);
}

void write_sweep(const SweepReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto csv_value = [](const std::string& v) {
        std::string out = "\"";
        for (char c : v) out += c == '"' ? std::string("\"\"") : std::string(1, c);
        return out + "\"";
    };
    std::ostringstream all, summary;
    std::ostringstream header;
    header << "point";
    for (const auto& p : report.pointers) header << ',' << csv_value(p);
    all << header.str() << ",repeat,seed,windows,gate_failures,mean_abs_distance_error_m,mean_abs_bpm_error,mean_ssnr_db\n";
    summary << header.str()
            << ",runs,gate_failures,mean_abs_distance_error_m,max_abs_distance_error_m,mean_abs_bpm_error,mean_ssnr_db\n";

    struct Acc {
        double sum = 0.0;
        double max = 0.0;
        std::size_t n = 0;
        void add(const std::optional<double>& v) {
            if (!v) return;
            sum += *v;
            max = std::max(max, *v);
            ++n;
        }
        std::optional<double> mean() const { return n == 0 ? std::nullopt : std::optional<double>(sum / n); }
        std::optional<double> maximum() const { return n == 0 ? std::nullopt : std::optional<double>(max); }
    };

    std::size_t i = 0;
    while (i < report.rows.size()) {
        const std::size_t point = report.rows[i].point;
        Acc dist, bpm, ssnr;
        std::size_t runs = 0;
        std::size_t failures = 0;
        std::string prefix = std::to_string(point);
        for (const auto& [ptr, value] : report.rows[i].parameters) prefix += "," + csv_value(value);
        for (; i < report.rows.size() && report.rows[i].point == point; ++i) {
            const SweepRow& r = report.rows[i];
            all << prefix << ',' << r.repeat << ',' << r.seed << ',' << r.windows << ',' << r.failures << ','
                << fmt(r.mean_abs_distance_error_m) << ',' << fmt(r.mean_abs_bpm_error) << ',' << fmt(r.mean_ssnr_db)
                << '\n';
            dist.add(r.mean_abs_distance_error_m);
            bpm.add(r.mean_abs_bpm_error);
            ssnr.add(r.mean_ssnr_db);
            ++runs;
            failures += r.failures;
        }
        summary << prefix << ',' << runs << ',' << failures << ',' << fmt(dist.mean()) << ',' << fmt(dist.maximum())
                << ',' << fmt(bpm.mean()) << ',' << fmt(ssnr.mean()) << '\n';
    }
    write_text(dir / "sweep.csv", all.str());
    write_text(dir / "sweep_summary.csv", summary.str());
}

}  // namespace cirsense
