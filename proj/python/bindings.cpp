#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cirsense/cir_recovery.hpp"
#include "cirsense/domino.hpp"
#include "cirsense/dylign.hpp"
#include "cirsense/error.hpp"
#include "cirsense/estimators.hpp"
#include "cirsense/pipeline.hpp"
#include "cirsense/scene_config.hpp"
#include "cirsense/trace_io.hpp"

namespace py = pybind11;
using namespace cirsense;

namespace {

CsiSeries make_csi(const Eigen::MatrixXcd& values, const SystemConfig& cfg, double sample_rate_hz) {
    if (static_cast<std::size_t>(values.rows()) != cfg.active_subcarriers.size())
        throw Error(ErrorCode::shape, "csi must have one row per active subcarrier");
    CsiSeries csi;
    csi.subcarriers = cfg.active_subcarriers;
    csi.dft_size = cfg.dft_size;
    csi.sample_rate_hz = sample_rate_hz;
    csi.values = values;
    for (Eigen::Index t = 0; t < values.cols(); ++t) csi.timestamps.push_back(t / sample_rate_hz);
    return csi;
}

py::dict truth_dict(const GroundTruth& g) {
    py::dict d;
    d["d0_m"] = g.separation_m;
    d["los_delay_s"] = g.los_delay_s;
    d["timestamps"] = g.timestamps;
    d["relative_delay_s"] = g.relative_delay_s;
    d["range_m"] = g.range_m;
    d["gains"] = g.gains;
    return d;
}

}  // namespace

PYBIND11_MODULE(_cirsense, m) {
    m.doc() = "CIR-domain WiFi sensing: LS recovery, dominant-path alignment, dynamic-path alignment.";

    static py::exception<Error> base(m, "CirsenseError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = py::reinterpret_borrow<py::object>(base.ptr())(e.what());
            err.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(base.ptr(), err.ptr());
        }
    });

    py::class_<SystemConfig>(m, "SystemConfig")
        .def(py::init(&SystemConfig::wifi_160mhz))
        .def_readwrite("carrier_freq_hz", &SystemConfig::carrier_freq_hz)
        .def_readwrite("bandwidth_hz", &SystemConfig::bandwidth_hz)
        .def_readwrite("dft_size", &SystemConfig::dft_size)
        .def_readwrite("active_subcarriers", &SystemConfig::active_subcarriers)
        .def_readwrite("tap_set", &SystemConfig::tap_set)
        .def_readwrite("light_speed_mps", &SystemConfig::light_speed_mps)
        .def_property_readonly("sample_interval_s", &SystemConfig::sample_interval_s)
        .def_property_readonly("wavelength_m", &SystemConfig::wavelength_m)
        .def("validate", &SystemConfig::validate);

    py::class_<CirSeries>(m, "CirSeries")
        .def_readonly("tap_offset", &CirSeries::tap_offset)
        .def_readonly("sample_rate_hz", &CirSeries::sample_rate_hz)
        .def_readonly("timestamps", &CirSeries::timestamps)
        .def_readonly("taps", &CirSeries::taps)
        .def("tap", [](const CirSeries& c, int n) -> Eigen::VectorXcd {
            if (!c.has_tap(n)) throw py::index_error("tap outside the series");
            return c.tap(n).transpose();
        });

    py::class_<DominoResult>(m, "DominoResult")
        .def_readonly("clean", &DominoResult::clean)
        .def_readonly("per_frame_shift", &DominoResult::per_frame_shift)
        .def_readonly("reference_tap_power", &DominoResult::reference_tap_power)
        .def_readonly("flags", &DominoResult::flags);

    py::class_<AlignmentResult>(m, "AlignmentResult")
        .def_readonly("tap_index", &AlignmentResult::tap_index)
        .def_readonly("fractional_shift", &AlignmentResult::fractional_shift)
        .def_readonly("motion_signal", &AlignmentResult::motion_signal)
        .def_readonly("variance_profile", &AlignmentResult::variance_profile)
        .def_readonly("profile_tap_offset", &AlignmentResult::profile_tap_offset)
        .def_readonly("coherence", &AlignmentResult::coherence)
        .def_readonly("aligned_variance", &AlignmentResult::aligned_variance)
        .def_readonly("unshifted_variance", &AlignmentResult::unshifted_variance)
        .def_readonly("interference", &AlignmentResult::interference)
        .def_property_readonly("delay_taps", &AlignmentResult::delay_taps);

    // Holds the operator and the clean spectra between stages.
    struct Session {
        SystemConfig cfg;
        PartialDftOperator op;
        DominoResult domino;
    };
    py::class_<Session>(m, "Channel", "Dominant-path aligned channel ready for dynamic-path search.")
        .def_readonly("domino", &Session::domino)
        .def("align", [](const Session& s) { return align_dynamic(s.domino, s.op); })
        .def("align_multi",
             [](const Session& s, int max_targets) { return align_multi(s.domino, s.op, {}, max_targets); },
             py::arg("max_targets") = 2);

    m.def(
        "clean_channel",
        [](const Eigen::MatrixXcd& csi, double sample_rate_hz, const SystemConfig& cfg, bool domino) {
            Session s{cfg, PartialDftOperator(cfg), {}};
            CsiSeries series = make_csi(csi, cfg, sample_rate_hz);
            s.domino = domino ? align_dominant(std::move(series), s.op) : passthrough_channel(std::move(series), s.op);
            return s;
        },
        py::arg("csi"), py::arg("sample_rate_hz"), py::arg("system") = SystemConfig::wifi_160mhz(),
        py::arg("domino") = true, "Recover the CIR from a (subcarriers x frames) CSI array and cancel distortions.");

    m.def(
        "recover_cir",
        [](const Eigen::MatrixXcd& csi, const SystemConfig& cfg) {
            return recover_cir(PartialDftOperator(cfg), make_csi(csi, cfg, 1.0));
        },
        py::arg("csi"), py::arg("system") = SystemConfig::wifi_160mhz(), "Least-squares taps, one column per frame.");

    m.def(
        "synthesize",
        [](const std::filesystem::path& scene, std::optional<std::uint64_t> seed) {
            SceneFile f = load_scene(scene);
            if (seed) f.scene.seed = *seed;
            const SyntheticTrace trace = synth_scene(f.system, f.scene);
            py::dict out;
            out["csi"] = trace.csi.values;
            out["sample_rate_hz"] = trace.csi.sample_rate_hz;
            out["system"] = f.system;
            out["truth"] = truth_dict(trace.truth);
            return out;
        },
        py::arg("scene"), py::arg("seed") = py::none(), "Synthesize a scene file; returns CSI and ground truth.");

    m.def(
        "read_trace",
        [](const std::filesystem::path& path) {
            const Trace t = read_trace(path);
            py::dict out;
            out["csi"] = t.csi.values;
            out["timestamps"] = t.csi.timestamps;
            out["sample_rate_hz"] = t.header.sample_rate_hz;
            out["d0_m"] = t.header.d0_m;
            out["system"] = t.header.system;
            return out;
        },
        py::arg("path"));

    m.def(
        "respiration_rate",
        [](const std::vector<cplx>& x, double fs) { return respiration_rate(x, fs); }, py::arg("signal"),
        py::arg("sample_rate_hz"), "Breathing rate in bpm of a complex motion signal.");

    m.def(
        "target_distance",
        [](double delay_s, double d0_m, const SystemConfig& cfg) { return target_distance(delay_s, cfg, d0_m); },
        py::arg("relative_delay_s"), py::arg("d0_m"), py::arg("system") = SystemConfig::wifi_160mhz(),
        "Bistatic path length c * tau + d0.");

    m.def(
        "run",
        [](const std::filesystem::path& trace_path, const std::string& mode, double window_s,
           std::optional<std::filesystem::path> gt, std::optional<std::filesystem::path> out, bool domino,
           bool dylign) {
            const Trace t = read_trace(trace_path);
            std::optional<GroundTruth> truth;
            if (gt) truth = read_ground_truth(*gt);
            PipelineOptions opt;
            opt.mode = parse_sensing_mode(mode);
            opt.window_s = window_s;
            opt.domino = domino;
            opt.dylign = dylign;
            PipelineReport r;
            {
                py::gil_scoped_release release;
                r = run_pipeline(t.csi, t.header.system, t.header.d0_m, opt, truth ? &*truth : nullptr,
                                 t.header.scene_name);
            }
            if (out) write_report(r, *out);
            py::list windows;
            for (const auto& w : r.windows) {
                py::list targets;
                for (const auto& tr : w.targets) {
                    py::dict d;
                    d["delay_taps"] = tr.alignment.delay_taps();
                    d["distance_m"] = tr.result.distance_m;
                    d["respiration_bpm"] = tr.result.respiration_bpm;
                    d["ssnr_db"] = tr.result.ssnr_db;
                    d["distance_error_m"] = tr.distance_error_m;
                    d["bpm_error"] = tr.bpm_error;
                    targets.append(d);
                }
                py::dict wd;
                wd["start_s"] = w.start_s;
                wd["end_s"] = w.end_s;
                wd["targets"] = targets;
                windows.append(wd);
            }
            py::dict res;
            res["windows"] = windows;
            res["gate_failures"] = r.gate_failures();
            py::list errors;
            for (const auto& e : r.errors)
                errors.append(py::make_tuple(e.window, e.stage, std::string(to_string(e.code)), e.message));
            res["errors"] = errors;
            return res;
        },
        py::arg("trace"), py::arg("mode") = "dual", py::arg("window_s") = 0.0, py::arg("gt") = py::none(),
        py::arg("out") = py::none(), py::arg("domino") = true, py::arg("dylign") = true,
        "Run the full pipeline on a trace file.");

    m.def(
        "write_synthetic",
        [](const std::filesystem::path& scene, const std::filesystem::path& out_dir, std::optional<std::uint64_t> seed) {
            SceneFile f = load_scene(scene);
            if (seed) f.scene.seed = *seed;
            const SyntheticTrace trace = synth_scene(f.system, f.scene);
            std::filesystem::create_directories(out_dir);
            const auto path = out_dir / (f.scene.name + ".cirs");
            write_trace(path,
                        TraceHeader{f.system, f.scene.sample_rate_hz, trace.csi.frame_count(),
                                    f.scene.geometry.separation_m, f.scene.name},
                        trace.csi);
            write_ground_truth(ground_truth_path_for(path), trace.truth, f.scene.name, f.system.carrier_freq_hz);
            return path;
        },
        py::arg("scene"), py::arg("out_dir"), py::arg("seed") = py::none(),
        "Synthesize a scene to <out_dir>/<name>.cirs and its ground truth.");
}
