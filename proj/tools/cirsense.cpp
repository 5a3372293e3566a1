// cirsense command-line driver: synth, run, sweep.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cirsense/cir_recovery.hpp"
#include "cirsense/error.hpp"
#include "cirsense/pipeline.hpp"
#include "cirsense/scene_config.hpp"
#include "cirsense/trace_io.hpp"

namespace fs = std::filesystem;
using namespace cirsense;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;
constexpr int kExitGate = 4;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::input_format:
        case ErrorCode::shape: return kExitInput;
        case ErrorCode::no_motion:
        case ErrorCode::edge:
        case ErrorCode::no_respiration: return kExitGate;
        case ErrorCode::config:
        case ErrorCode::rank_deficient:
        case ErrorCode::invariant: return kExitConfig;
    }
    return kExitInternal;
}

struct SynthArgs {
    std::string scene;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool dump_cir = false;
};

struct RunArgs {
    std::string trace;
    std::string gt;
    std::string mode = "dual";
    double window_s = 0.0;
    double hop_s = 0.0;
    std::string out;
    std::optional<double> d0;
    int max_targets = 2;
    bool dump_cir = false;
};

struct SweepArgs {
    std::string grid;
    std::string scene_template;
    std::string out;
};

struct StageFlags {
    bool no_domino = false;
    bool no_dylign = false;
    bool batch = false;
};

void add_stage_flags(CLI::App* cmd, StageFlags& flags) {
    cmd->add_flag("--no-domino", flags.no_domino, "Skip dominant-path alignment (raw recovered taps)");
    cmd->add_flag("--no-dylign", flags.no_dylign, "Skip the fractional dynamic-path shift");
    cmd->add_flag("--batch", flags.batch, "Exit with status 4 when any window fails a gate");
}

int cmd_synth(const SynthArgs& a) {
    SceneFile file = load_scene(a.scene);
    if (a.seed) file.scene.seed = *a.seed;
    const SyntheticTrace trace = synth_scene(file.system, file.scene);

    fs::create_directories(a.out);
    const fs::path trace_path = fs::path(a.out) / (file.scene.name + ".cirs");
    TraceHeader header;
    header.system = file.system;
    header.sample_rate_hz = file.scene.sample_rate_hz;
    header.frame_count = trace.csi.frame_count();
    header.d0_m = file.scene.geometry.separation_m;
    header.scene_name = file.scene.name;
    write_trace(trace_path, header, trace.csi);
    const fs::path gt_path = ground_truth_path_for(trace_path);
    write_ground_truth(gt_path, trace.truth, file.scene.name, file.system.carrier_freq_hz);
    std::cout << "trace " << trace_path.string() << " (" << trace.csi.frame_count() << " frames)\n";
    std::cout << "truth " << gt_path.string() << "\n";
    if (a.dump_cir) {
        const fs::path cir_path = fs::path(a.out) / (file.scene.name + ".cirt");
        write_cir(cir_path, recover_cir(PartialDftOperator(file.system), trace.csi));
        std::cout << "cir   " << cir_path.string() << "\n";
    }
    return kExitOk;
}

int cmd_run(const RunArgs& a, const StageFlags& flags) {
    PipelineOptions options;
    options.mode = parse_sensing_mode(a.mode);
    options.window_s = a.window_s;
    options.hop_s = a.hop_s;
    options.domino = !flags.no_domino;
    options.dylign = !flags.no_dylign;
    options.max_targets = a.max_targets;

    const Trace trace = read_trace(fs::path(a.trace));
    const double d0 = a.d0.value_or(trace.header.d0_m);
    if (!(d0 > 0.0)) throw Error(ErrorCode::config, "trace header has no d0_m; pass --d0");
    std::optional<GroundTruth> truth;
    if (!a.gt.empty()) truth = read_ground_truth(fs::path(a.gt));

    const PipelineReport report = run_pipeline(trace.csi, trace.header.system, d0, options,
                                               truth ? &*truth : nullptr, trace.header.scene_name);
    write_report(report, a.out);
    if (a.dump_cir) {
        const PartialDftOperator op(trace.header.system);
        const DominoResult clean = options.domino ? align_dominant(trace.csi, op, options.domino_options)
                                                  : passthrough_channel(trace.csi, op);
        write_cir(fs::path(a.out) / "clean.cirt", clean.clean);
    }

    std::cout << "windows " << report.windows.size() << ", gate failures " << report.gate_failures();
    if (const auto e = report.mean_abs_distance_error()) std::cout << ", mean |distance error| " << *e << " m";
    if (const auto e = report.mean_abs_bpm_error()) std::cout << ", mean |bpm error| " << *e;
    std::cout << "\n";
    for (const auto& e : report.errors) std::cerr << "window " << e.window << " [" << e.stage << "] " << e.message << "\n";
    return flags.batch && report.gate_failures() > 0 ? kExitGate : kExitOk;
}

int cmd_sweep(const SweepArgs& a, const StageFlags& flags) {
    PipelineOptions options;
    options.domino = !flags.no_domino;
    options.dylign = !flags.no_dylign;
    const SweepReport report = run_sweep(fs::path(a.grid), fs::path(a.scene_template), options);
    write_sweep(report, a.out);
    std::cout << "runs " << report.rows.size() << ", gate failures " << report.failures() << "\n";
    return flags.batch && report.failures() > 0 ? kExitGate : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CSI-to-CIR sensing pipeline: synthesize, run and sweep"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Synthesize a trace and its ground truth from a scene file");
    synth_cmd->add_option("--scene", synth.scene, "Scene JSON")->required();
    synth_cmd->add_option("--out", synth.out, "Output directory")->required();
    synth_cmd->add_option("--seed", synth.seed, "Override the scene seed");
    synth_cmd->add_flag("--dump-cir", synth.dump_cir, "Also write the recovered CIR (CIRT1)");

    RunArgs run;
    StageFlags run_flags;
    auto* run_cmd = app.add_subcommand("run", "Run the sensing pipeline on a trace");
    run_cmd->add_option("--trace", run.trace, "CIRS1 trace")->required();
    run_cmd->add_option("--gt", run.gt, "Ground-truth JSON lines for error reporting");
    run_cmd->add_option("--mode", run.mode, "respiration | distance | dual | multi")->capture_default_str();
    run_cmd->add_option("--window-s", run.window_s, "Window length in seconds (0: whole trace)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--hop-s", run.hop_s, "Window hop in seconds (0: window length)")->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--out", run.out, "Output directory")->required();
    run_cmd->add_option("--d0", run.d0, "Transceiver separation in meters (default: trace header)");
    run_cmd->add_option("--max-targets", run.max_targets, "Targets reported in multi mode")->capture_default_str();
    run_cmd->add_flag("--dump-cir", run.dump_cir, "Also write the clean CIR (CIRT1)");
    add_stage_flags(run_cmd, run_flags);

    SweepArgs sweep;
    StageFlags sweep_flags;
    auto* sweep_cmd = app.add_subcommand("sweep", "Synthesize and run every point of a parameter grid");
    sweep_cmd->add_option("--grid", sweep.grid, "Grid JSON")->required();
    sweep_cmd->add_option("--template", sweep.scene_template, "Scene JSON template")->required();
    sweep_cmd->add_option("--out", sweep.out, "Output directory")->required();
    add_stage_flags(sweep_cmd, sweep_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (synth_cmd->parsed()) return cmd_synth(synth);
        if (run_cmd->parsed()) return cmd_run(run, run_flags);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep, sweep_flags);
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
