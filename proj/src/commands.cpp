#include "drtrack/commands.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "drtrack/error.hpp"
#include "drtrack/image.hpp"
#include "drtrack/tracker.hpp"

namespace drtrack {

namespace fs = std::filesystem;

namespace {

int default_workers(int requested) {
    if (requested > 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const ShapeError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

TrackerFactory factory_for(const Config& config, const CnTable* cn) {
    const CnTable* table = cn != nullptr && !cn->empty() ? cn : nullptr;
    return [config, table] { return std::make_unique<DrSequenceTracker>(config, table); };
}

}  // namespace

Config resolve_config(const CommonOptions& common) {
    Config cfg = common.config_file ? Config::load(*common.config_file) : Config{};
    for (const auto& [key, value] : common.overrides)
        cfg.set(key, value);
    cfg.validate();
    return cfg;
}

CnTable resolve_cn_table(const Config& config, std::ostream& log) {
    if (!config.use_cn)
        return {};
    std::string path = config.cn_table;
    if (const char* env = std::getenv(kCnTableEnv); env != nullptr && *env != '\0')
        path = env;
    if (path.empty()) {
        log << "warning: color names requested but no table configured (set cn_table or " << kCnTableEnv
            << "); using gray + HOG\n";
        return {};
    }
    try {
        return CnTable::load(path);
    } catch (const DataError& e) {
        log << "warning: " << e.what() << "; using gray + HOG\n";
        return {};
    }
}

OpeReport bench(const fs::path& dataset, const Config& config, const CnTable* cn, int workers) {
    const auto dirs = list_sequences(dataset, config);
    return run_ope(factory_for(config, cn), dirs, config, default_workers(workers));
}

std::vector<AblationRow> ablate(const fs::path& dataset, const Config& config, const CnTable* cn, int workers) {
    std::vector<AblationRow> rows{
        {"full", false, false}, {"dr_only", false, true}, {"ma_only", true, false}, {"baseline", true, true}};
    for (auto& row : rows) {
        Config c = config;
        c.no_dr = row.no_dr;
        c.no_ma = row.no_ma;
        const OpeReport rep = bench(dataset, c, cn, workers);
        row.precision20 = rep.mean_precision20;
        row.auc = rep.mean_auc;
        row.fps = rep.mean_fps;
    }
    return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
    std::string out = "config,dr,ma,precision_20,auc,fps\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%.6f,%.6f,%.2f\n", r.name.c_str(), r.no_dr ? 0 : 1, r.no_ma ? 0 : 1,
                      r.precision20, r.auc, r.fps);
        out += buf;
    }
    return out;
}

int cmd_track(const TrackOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        using clock = std::chrono::steady_clock;
        const Config config = resolve_config(opts.common);
        const CnTable cn = resolve_cn_table(config, err);
        const Sequence seq = load_sequence(opts.sequence, config.image_dir, config.groundtruth_file);
        fs::create_directories(opts.common.out);
        if (opts.overlay)
            fs::create_directories(opts.common.out / "overlay");

        DrSequenceTracker tracker(config, cn.empty() ? nullptr : &cn);
        std::vector<BBox> boxes;
        double seconds = 0.0;
        int zero_frames = 0;
        char name[32];
        for (std::size_t f = 0; f < seq.frames.size(); ++f) {
            Image frame = load_image(seq.frames[f]);
            const auto t0 = clock::now();
            if (f == 0) {
                tracker.initialize(frame, *seq.groundtruth.front());
                boxes.push_back(*seq.groundtruth.front());
            } else {
                const auto res = tracker.track(frame);
                boxes.push_back(res.box);
                zero_frames += res.zero_response ? 1 : 0;
            }
            seconds += std::chrono::duration<double>(clock::now() - t0).count();
            if (opts.overlay) {
                draw_box(frame, boxes.back(), 2, "#" + std::to_string(f + 1));
                std::snprintf(name, sizeof name, "%04zu.png", f + 1);
                save_image(frame, opts.common.out / "overlay" / name);
            }
        }
        write_boxes(opts.common.out / (seq.name + ".txt"), boxes);

        nlohmann::ordered_json timing;
        timing["sequence"] = seq.name;
        timing["frames"] = boxes.size();
        timing["seconds"] = seconds;
        timing["fps"] = seconds > 0.0 ? boxes.size() / seconds : 0.0;
        timing["zero_response_frames"] = zero_frames;
        std::ofstream(opts.common.out / "timing.json", std::ios::binary) << timing.dump(2) << '\n';
        out << seq.name << ": " << boxes.size() << " frames, " << timing["fps"].get<double>() << " fps\n";
        return kExitOk;
    });
}

int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        Config config = resolve_config(opts.common);
        config.no_dr = config.no_dr || opts.no_dr;
        config.no_ma = config.no_ma || opts.no_ma;
        const CnTable cn = resolve_cn_table(config, err);
        const OpeReport rep = bench(opts.dataset, config, &cn, opts.workers);
        write_report(opts.common.out, rep);
        for (const auto& s : rep.sequences) {
            if (s.error)
                err << s.name << ": failed: " << *s.error << '\n';
            else
                out << s.name << ": precision@20 " << s.precision20 << ", AUC " << s.auc << ", " << s.fps << " fps\n";
        }
        out << "mean: precision@20 " << rep.mean_precision20 << ", AUC " << rep.mean_auc << ", " << rep.mean_fps
            << " fps\n";
        return kExitOk;
    });
}

int cmd_ablate(const BenchOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Config config = resolve_config(opts.common);
        const CnTable cn = resolve_cn_table(config, err);
        const auto rows = ablate(opts.dataset, config, &cn, opts.workers);
        const std::string csv = ablation_csv(rows);
        fs::create_directories(opts.common.out);
        std::ofstream file(opts.common.out / "ablation.csv", std::ios::binary);
        if (!file)
            throw DataError("cannot write " + (opts.common.out / "ablation.csv").string());
        file << csv;
        out << csv;
        return kExitOk;
    });
}

}  // namespace drtrack
