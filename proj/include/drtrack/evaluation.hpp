#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "drtrack/config.hpp"
#include "drtrack/image.hpp"
#include "drtrack/tracker.hpp"

namespace drtrack {

struct Sequence {
    std::string name;
    std::vector<std::filesystem::path> frames;
    /// One entry per frame; empty where the annotation is missing or NaN.
    std::vector<std::optional<BBox>> groundtruth;
    std::set<std::string> attributes;
};

/// Reads `<dir>/<image_dir>/*` (sorted by file name) and `<dir>/<groundtruth_file>`
/// with one "x,y,w,h" line per frame, comma, tab or space separated. An optional
/// `<dir>/attributes.txt` lists tags.
Sequence load_sequence(const std::filesystem::path& dir, const std::string& image_dir = "img",
                       const std::string& groundtruth_file = "groundtruth_rect.txt");

/// Parses one groundtruth line; nullopt for NaN or blank lines.
std::optional<BBox> parse_box_line(std::string_view line, int line_no);

struct ResultRecord {
    std::vector<BBox> boxes;
    std::vector<double> seconds;
    std::vector<bool> zero_response;
};

struct MetricOptions {
    bool precision_inclusive = true;  ///< distance <= threshold (else <)
    bool success_strict = true;       ///< IoU > threshold (else >=)
};

double center_error(const BBox& a, const BBox& b);
double iou(const BBox& a, const BBox& b);

inline constexpr int kPrecisionThresholds = 51;  // 0..50 px
inline constexpr int kSuccessThresholds = 101;   // 0..1 step 0.01
inline constexpr int kHeadlinePrecisionPx = 20;

double success_threshold(int i);

/// Fraction of annotated frames whose center error is within each threshold 0..50 px.
std::vector<double> precision_curve(std::span<const BBox> pred, std::span<const std::optional<BBox>> gt,
                                    const MetricOptions& opts = {});

struct SuccessCurve {
    std::vector<double> curve;
    double auc = 0.0;
};

/// Fraction of annotated frames whose IoU exceeds each threshold 0..1; AUC is the mean.
SuccessCurve success_curve(std::span<const BBox> pred, std::span<const std::optional<BBox>> gt,
                           const MetricOptions& opts = {});

struct SequenceReport {
    std::string name;
    int frames = 0;
    double precision20 = 0.0;
    double auc = 0.0;
    double fps = 0.0;
    double seconds = 0.0;
    int zero_response_frames = 0;
    std::optional<std::string> error;
    std::vector<double> precision;
    std::vector<double> success;
    std::vector<BBox> boxes;
};

struct OpeReport {
    std::vector<SequenceReport> sequences;  ///< ordered by name
    double mean_precision20 = 0.0;
    double mean_auc = 0.0;
    double mean_fps = 0.0;
    std::vector<double> mean_precision;
    std::vector<double> mean_success;
};

using TrackerFactory = std::function<std::unique_ptr<SequenceTracker>()>;

/// One-pass evaluation of a single loaded sequence: initialize on the first
/// groundtruth box and track to the end. Decode time is not counted.
SequenceReport evaluate_sequence(const Sequence& seq, const TrackerFactory& factory, const MetricOptions& opts);

/// Same protocol over frames produced on demand by `frame(i)`, i < count.
SequenceReport evaluate_frames(const std::string& name, std::size_t count, const std::function<Image(std::size_t)>& frame,
                               std::span<const std::optional<BBox>> groundtruth, const TrackerFactory& factory,
                               const MetricOptions& opts);

/// Runs every sequence directory (in parallel when workers > 1). Failures are
/// recorded per sequence; the mean row covers the sequences that succeeded.
OpeReport run_ope(const TrackerFactory& factory, std::span<const std::filesystem::path> sequence_dirs,
                  const Config& config, int workers = 1);

/// Subdirectories of `dataset` that look like sequences, sorted by name.
std::vector<std::filesystem::path> list_sequences(const std::filesystem::path& dataset, const Config& config);

void write_boxes(const std::filesystem::path& path, std::span<const BBox> boxes);
void write_curve(const std::filesystem::path& path, std::span<const double> curve, bool success);

/// JSON summary; `include_timing = false` drops fps/seconds so runs can be diffed.
std::string summary_json(const OpeReport& report, bool include_timing = true);

/// Box file, curves and summary.json under `out`.
void write_report(const std::filesystem::path& out, const OpeReport& report);

}  // namespace drtrack
