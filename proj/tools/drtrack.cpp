// drtrack command-line front end: track, bench, ablate, synth.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "drtrack/commands.hpp"
#include "drtrack/error.hpp"
#include "drtrack/synthetic.hpp"

namespace {

using namespace drtrack;

void add_common(CLI::App* cmd, CommonOptions& common, std::vector<std::string>& sets) {
    cmd->add_option("--config", common.config_file, "key = value config file")->check(CLI::ExistingFile);
    cmd->add_option("--out", common.out, "output directory")->required();
    cmd->add_option("--set", sets, "override one config key (key=value), repeatable");
}

bool apply_sets(const std::vector<std::string>& sets, CommonOptions& common) {
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "error: --set expects key=value, got '" << s << "'\n";
            return false;
        }
        common.overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return true;
}

int run_synth(const std::string& kind, const std::filesystem::path& out, int frames) {
    if (kind == "distractor") {
        for (const auto& seq : make_distractor_dataset())
            write_sequence(out / seq.name, seq);
        return kExitOk;
    }
    MotionSpec spec;
    if (frames > 0)
        spec.frames = frames;
    if (kind == "moving") {
        write_sequence(out / "moving", make_moving_sequence("moving", spec));
    } else if (kind == "static") {
        write_sequence(out / "static", make_static_sequence("static", spec));
    } else if (kind == "zoom") {
        write_sequence(out / "zoom", make_zoom_sequence("zoom", spec));
    } else if (kind == "throughput") {
        spec.width = 640;
        spec.height = 360;
        spec.frames = frames > 0 ? frames : 300;
        spec.start = {300.0, 160.0, 40.0, 40.0};
        spec.velocity = {0.5, 0.2};
        write_sequence(out / "throughput", make_moving_sequence("throughput", spec));
    } else {
        std::cerr << "error: unknown synthetic kind '" << kind << "'\n";
        return kExitUsage;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distractor-repressed correlation filter tracker"};
    app.require_subcommand(1);

    TrackOptions track;
    std::vector<std::string> track_sets;
    auto* track_cmd = app.add_subcommand("track", "track one sequence");
    track_cmd->add_option("sequence", track.sequence, "sequence directory")->required();
    add_common(track_cmd, track.common, track_sets);
    track_cmd->add_flag("--overlay", track.overlay, "write frames with the predicted box drawn");

    BenchOptions bench;
    std::vector<std::string> bench_sets;
    auto* bench_cmd = app.add_subcommand("bench", "one-pass evaluation over a dataset");
    bench_cmd->add_option("dataset", bench.dataset, "directory of sequence directories")->required();
    add_common(bench_cmd, bench.common, bench_sets);
    bench_cmd->add_option("--workers", bench.workers, "parallel sequences (default: logical cores)")
        ->check(CLI::NonNegativeNumber);
    bench_cmd->add_flag("--no-dr", bench.no_dr, "disable distractor repression");
    bench_cmd->add_flag("--no-ma", bench.no_ma, "disable motion-aware search");

    BenchOptions ablate;
    std::vector<std::string> ablate_sets;
    auto* ablate_cmd = app.add_subcommand("ablate", "full / DR only / MA only / baseline comparison");
    ablate_cmd->add_option("dataset", ablate.dataset, "directory of sequence directories")->required();
    add_common(ablate_cmd, ablate.common, ablate_sets);
    ablate_cmd->add_option("--workers", ablate.workers, "parallel sequences (default: logical cores)")
        ->check(CLI::NonNegativeNumber);

    std::string synth_kind;
    std::filesystem::path synth_out;
    int synth_frames = 0;
    auto* synth_cmd = app.add_subcommand("synth", "render a synthetic dataset");
    synth_cmd->add_option("kind", synth_kind, "moving | static | zoom | distractor | throughput")->required();
    synth_cmd->add_option("--out", synth_out, "output dataset directory")->required();
    synth_cmd->add_option("--frames", synth_frames, "frame count override")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (*track_cmd) {
        if (!apply_sets(track_sets, track.common))
            return kExitUsage;
        return cmd_track(track, std::cout, std::cerr);
    }
    if (*bench_cmd) {
        if (!apply_sets(bench_sets, bench.common))
            return kExitUsage;
        return cmd_bench(bench, std::cout, std::cerr);
    }
    if (*ablate_cmd) {
        if (!apply_sets(ablate_sets, ablate.common))
            return kExitUsage;
        return cmd_ablate(ablate, std::cout, std::cerr);
    }
    try {
        return run_synth(synth_kind, synth_out, synth_frames);
    } catch (const drtrack::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}
