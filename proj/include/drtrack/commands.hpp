#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drtrack/config.hpp"
#include "drtrack/evaluation.hpp"
#include "drtrack/features.hpp"

namespace drtrack {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitInternal = 3 };

struct CommonOptions {
    std::optional<std::filesystem::path> config_file;
    /// `key=value` assignments applied after the file, in order.
    std::vector<std::pair<std::string, std::string>> overrides;
    std::filesystem::path out;
};

/// Config file (if any) + overrides, validated.
Config resolve_config(const CommonOptions& common);

/// Loads the color-names table named by the environment override or the
/// config. Returns an empty table (and prints a warning to `log`) when color
/// names are requested but unavailable, in which case tracking runs on gray + HOG.
CnTable resolve_cn_table(const Config& config, std::ostream& log);

struct TrackOptions {
    CommonOptions common;
    std::filesystem::path sequence;
    bool overlay = false;
};

struct BenchOptions {
    CommonOptions common;
    std::filesystem::path dataset;
    int workers = 0;  ///< 0: one per logical core
    bool no_dr = false;
    bool no_ma = false;
};

/// Evaluation without writing anything; used by cmd_bench and tests.
OpeReport bench(const std::filesystem::path& dataset, const Config& config, const CnTable* cn, int workers);

struct AblationRow {
    std::string name;
    bool no_dr = false;
    bool no_ma = false;
    double precision20 = 0.0;
    double auc = 0.0;
    double fps = 0.0;
};

/// Full, DR only, MA only, baseline; in that order.
std::vector<AblationRow> ablate(const std::filesystem::path& dataset, const Config& config, const CnTable* cn,
                                int workers);
std::string ablation_csv(const std::vector<AblationRow>& rows);

// Each returns a process exit status and reports failures on `err`.
int cmd_track(const TrackOptions& opts, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err);
int cmd_ablate(const BenchOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace drtrack
