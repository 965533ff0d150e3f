#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "drtrack/solver.hpp"

namespace drtrack {

/// Every tunable of the tracker and the evaluation harness. Defaults are the
/// published settings; the remaining ones follow the usual DCF conventions.
struct Config {
    // ADMM / objective
    double theta = 12.0;
    double gamma0 = 1.0;
    double beta = 10.0;
    double gamma_max = 10000.0;
    int admm_iterations = 4;
    double w_min = 1e-3;
    double w_amp = 20.0;  // in units of sqrt(K), see tracker

    // dynamic regression target
    double mu = 0.25;
    int num_distractors = 30;
    /// How d enters the target: "product" is g * d; "additive" is g + (d - 1),
    /// which also reaches distractors where g has decayed to zero.
    std::string repression = "additive";
    double sigma_factor = 1.0 / 16.0;

    // appearance
    int cell_size = 4;
    double search_factor = 5.0;
    bool use_gray = true;
    bool use_hog = true;
    bool use_cn = true;
    std::string cn_table;

    // scale filter
    int num_scales = 33;
    double scale_step = 1.02;
    double scale_learning_rate = 0.025;
    double scale_sigma_factor = 0.25;
    double scale_lambda = 0.01;
    double scale_model_max_area = 512.0;

    // ablation toggles
    bool no_dr = false;
    bool no_ma = false;
    bool subpixel = true;

    // evaluation
    bool precision_inclusive = true;
    bool success_strict = true;
    std::string image_dir = "img";
    std::string groundtruth_file = "groundtruth_rect.txt";

    AdmmParams admm() const { return {theta, gamma0, gamma_max, beta, admm_iterations}; }

    /// Throws DataError naming the offending key.
    void validate() const;

    /// Applies one `key = value` assignment; unknown keys and unparseable
    /// values throw DataError.
    void set(std::string_view key, std::string_view value);

    /// Flat `key = value` text, one line per field, every field materialized.
    std::string serialize() const;

    /// Parses the flat format; `#` starts a comment, blank lines are ignored.
    static Config parse(std::string_view text, std::string_view origin = "<config>");
    static Config load(const std::filesystem::path& path);

    friend bool operator==(const Config&, const Config&) = default;
};

/// Environment variable that overrides the color-names table path.
inline constexpr const char* kCnTableEnv = "DRTRACK_CN_TABLE";

}  // namespace drtrack
