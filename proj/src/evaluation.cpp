#include "drtrack/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "drtrack/error.hpp"

namespace drtrack {

namespace fs = std::filesystem;

namespace {

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp" || ext == ".pgm" || ext == ".ppm";
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    auto is_sep = [](char c) { return c == ',' || c == '\t' || c == ' ' || c == '\r'; };
    while (i < line.size()) {
        while (i < line.size() && is_sep(line[i]))
            ++i;
        std::size_t j = i;
        while (j < line.size() && !is_sep(line[j]))
            ++j;
        if (j > i)
            out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

bool is_nan_token(std::string_view s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    return lower == "nan" || lower == "-nan";
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void check_lengths(std::size_t pred, std::size_t gt) {
    if (pred != gt)
        throw ShapeError("prediction has " + std::to_string(pred) + " frames, groundtruth " + std::to_string(gt));
}

template <class Fn>
std::vector<double> fraction_curve(std::span<const BBox> pred, std::span<const std::optional<BBox>> gt, int n, Fn hit) {
    check_lengths(pred.size(), gt.size());
    std::vector<double> curve(static_cast<std::size_t>(n), 0.0);
    std::vector<int> counts(static_cast<std::size_t>(n), 0);
    int valid = 0;
    for (std::size_t f = 0; f < pred.size(); ++f) {
        if (!gt[f])
            continue;
        ++valid;
        for (int i = 0; i < n; ++i)
            if (hit(pred[f], *gt[f], i))
                ++counts[static_cast<std::size_t>(i)];
    }
    if (valid > 0)
        for (int i = 0; i < n; ++i)
            curve[static_cast<std::size_t>(i)] = static_cast<double>(counts[static_cast<std::size_t>(i)]) / valid;
    return curve;
}

// Both curves are cumulative counts, so a violation means a counting bug.
void check_monotone(const std::vector<double>& curve, bool increasing) {
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (increasing ? curve[i] < curve[i - 1] : curve[i] > curve[i - 1])
            throw std::logic_error("metric curve is not monotone");
}

}  // namespace

std::optional<BBox> parse_box_line(std::string_view line, int line_no) {
    const auto fields = split_fields(line);
    if (fields.empty())
        return std::nullopt;
    if (fields.size() != 4)
        throw DataError("groundtruth line " + std::to_string(line_no) + ": expected 4 values, got " +
                        std::to_string(fields.size()));
    double v[4];
    bool any_nan = false;
    for (int i = 0; i < 4; ++i) {
        const auto f = fields[static_cast<std::size_t>(i)];
        if (is_nan_token(f)) {
            any_nan = true;
            continue;
        }
        const auto res = std::from_chars(f.data(), f.data() + f.size(), v[i]);
        if (res.ec != std::errc() || res.ptr != f.data() + f.size())
            throw DataError("groundtruth line " + std::to_string(line_no) + ": cannot parse '" + std::string(f) + "'");
    }
    if (any_nan)
        return std::nullopt;
    return BBox{v[0], v[1], v[2], v[3]};
}

Sequence load_sequence(const fs::path& dir, const std::string& image_dir, const std::string& groundtruth_file) {
    if (!fs::is_directory(dir))
        throw DataError("sequence directory not found: " + dir.string());
    Sequence seq;
    seq.name = dir.filename().string();
    if (seq.name.empty())
        seq.name = dir.parent_path().filename().string();

    const fs::path img = dir / image_dir;
    if (!fs::is_directory(img))
        throw DataError("image directory not found: " + img.string());
    for (const auto& entry : fs::directory_iterator(img))
        if (entry.is_regular_file() && is_image_file(entry.path()))
            seq.frames.push_back(entry.path());
    std::sort(seq.frames.begin(), seq.frames.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    if (seq.frames.empty())
        throw DataError("no frames in " + img.string());
    if (seq.frames.size() < 2)
        throw DataError("sequence " + seq.name + " has a single frame");

    const fs::path gt_path = dir / groundtruth_file;
    if (!fs::is_regular_file(gt_path))
        throw DataError("groundtruth file not found: " + gt_path.string());
    const std::string text = read_text(gt_path);
    std::istringstream lines(text);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        seq.groundtruth.push_back(parse_box_line(line, line_no));
    }
    while (!seq.groundtruth.empty() && !seq.groundtruth.back() && seq.groundtruth.size() > seq.frames.size())
        seq.groundtruth.pop_back();
    if (seq.groundtruth.size() > seq.frames.size())
        throw DataError(gt_path.string() + ": " + std::to_string(seq.groundtruth.size()) + " boxes for " +
                        std::to_string(seq.frames.size()) + " frames");
    seq.groundtruth.resize(seq.frames.size());
    if (!seq.groundtruth.front() || !seq.groundtruth.front()->valid())
        throw DataError(gt_path.string() + ": first box missing or degenerate");

    const fs::path attr = dir / "attributes.txt";
    if (fs::is_regular_file(attr))
        for (auto tag : split_fields(read_text(attr))) {
            std::string s(tag);
            std::erase(s, '\n');
            if (!s.empty())
                seq.attributes.insert(s);
        }
    return seq;
}

double center_error(const BBox& a, const BBox& b) {
    const Point2 ca = a.center();
    const Point2 cb = b.center();
    return std::hypot(ca.x - cb.x, ca.y - cb.y);
}

double iou(const BBox& a, const BBox& b) {
    const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
    const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
    const double inter = ix * iy;
    const double uni = a.w * a.h + b.w * b.h - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

double success_threshold(int i) { return i / 100.0; }

std::vector<double> precision_curve(std::span<const BBox> pred, std::span<const std::optional<BBox>> gt,
                                    const MetricOptions& opts) {
    auto curve = fraction_curve(pred, gt, kPrecisionThresholds, [&](const BBox& p, const BBox& g, int tau) {
        const double e = center_error(p, g);
        return opts.precision_inclusive ? e <= tau : e < tau;
    });
    check_monotone(curve, true);
    return curve;
}

SuccessCurve success_curve(std::span<const BBox> pred, std::span<const std::optional<BBox>> gt,
                           const MetricOptions& opts) {
    SuccessCurve out;
    out.curve = fraction_curve(pred, gt, kSuccessThresholds, [&](const BBox& p, const BBox& g, int i) {
        const double o = iou(p, g);
        const double th = success_threshold(i);
        return opts.success_strict ? o > th : o >= th;
    });
    check_monotone(out.curve, false);
    double sum = 0.0;
    for (double v : out.curve)
        sum += v;
    out.auc = sum / static_cast<double>(out.curve.size());
    return out;
}

SequenceReport evaluate_frames(const std::string& name, std::size_t count, const std::function<Image(std::size_t)>& frame,
                               std::span<const std::optional<BBox>> groundtruth, const TrackerFactory& factory,
                               const MetricOptions& opts) {
    using clock = std::chrono::steady_clock;
    check_lengths(count, groundtruth.size());
    if (count == 0 || !groundtruth.front())
        throw DataError(name + ": first groundtruth box is missing");
    SequenceReport rep;
    rep.name = name;
    rep.frames = static_cast<int>(count);

    auto tracker = factory();
    ResultRecord rec;
    rec.boxes.reserve(count);
    for (std::size_t f = 0; f < count; ++f) {
        const Image img = frame(f);
        const auto t0 = clock::now();
        if (f == 0) {
            tracker->initialize(img, *groundtruth.front());
            rec.boxes.push_back(*groundtruth.front());
            rec.zero_response.push_back(false);
        } else {
            const auto out = tracker->track(img);
            rec.boxes.push_back(out.box);
            rec.zero_response.push_back(out.zero_response);
        }
        rec.seconds.push_back(std::chrono::duration<double>(clock::now() - t0).count());
    }

    for (double s : rec.seconds)
        rep.seconds += s;
    rep.fps = rep.seconds > 0.0 ? rep.frames / rep.seconds : 0.0;
    rep.zero_response_frames = static_cast<int>(std::count(rec.zero_response.begin(), rec.zero_response.end(), true));
    rep.precision = precision_curve(rec.boxes, groundtruth, opts);
    const auto succ = success_curve(rec.boxes, groundtruth, opts);
    rep.success = succ.curve;
    rep.auc = succ.auc;
    rep.precision20 = rep.precision[kHeadlinePrecisionPx];
    rep.boxes = std::move(rec.boxes);
    return rep;
}

SequenceReport evaluate_sequence(const Sequence& seq, const TrackerFactory& factory, const MetricOptions& opts) {
    return evaluate_frames(
        seq.name, seq.frames.size(), [&](std::size_t i) { return load_image(seq.frames[i]); }, seq.groundtruth,
        factory, opts);
}

std::vector<fs::path> list_sequences(const fs::path& dataset, const Config& config) {
    if (!fs::is_directory(dataset))
        throw DataError("dataset directory not found: " + dataset.string());
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dataset))
        if (entry.is_directory() && fs::is_directory(entry.path() / config.image_dir))
            out.push_back(entry.path());
    std::sort(out.begin(), out.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    if (out.empty())
        throw DataError("no sequences found in " + dataset.string());
    return out;
}

OpeReport run_ope(const TrackerFactory& factory, std::span<const fs::path> sequence_dirs, const Config& config,
                  int workers) {
    const MetricOptions opts{config.precision_inclusive, config.success_strict};
    std::vector<SequenceReport> reports(sequence_dirs.size());
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t i = next++; i < sequence_dirs.size(); i = next++) {
            SequenceReport& rep = reports[i];
            try {
                const Sequence seq = load_sequence(sequence_dirs[i], config.image_dir, config.groundtruth_file);
                rep = evaluate_sequence(seq, factory, opts);
            } catch (const std::exception& e) {
                rep = SequenceReport{};
                rep.name = sequence_dirs[i].filename().string();
                rep.error = e.what();
            }
        }
    };
    const int n = std::clamp(workers, 1, std::max(1, static_cast<int>(sequence_dirs.size())));
    if (n == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int k = 0; k < n; ++k)
            pool.emplace_back(work);
    }

    OpeReport out;
    out.sequences = std::move(reports);
    std::stable_sort(out.sequences.begin(), out.sequences.end(),
                     [](const SequenceReport& a, const SequenceReport& b) { return a.name < b.name; });
    out.mean_precision.assign(kPrecisionThresholds, 0.0);
    out.mean_success.assign(kSuccessThresholds, 0.0);
    int ok = 0;
    for (const auto& s : out.sequences) {
        if (s.error)
            continue;
        ++ok;
        out.mean_fps += s.fps;
        out.mean_auc += s.auc;
        for (std::size_t i = 0; i < s.precision.size(); ++i)
            out.mean_precision[i] += s.precision[i];
        for (std::size_t i = 0; i < s.success.size(); ++i)
            out.mean_success[i] += s.success[i];
    }
    if (ok > 0) {
        out.mean_fps /= ok;
        out.mean_auc /= ok;
        for (double& v : out.mean_precision)
            v /= ok;
        for (double& v : out.mean_success)
            v /= ok;
    }
    out.mean_precision20 = out.mean_precision[kHeadlinePrecisionPx];
    return out;
}

void write_boxes(const fs::path& path, std::span<const BBox> boxes) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write " + path.string());
    char buf[160];
    for (const BBox& b : boxes) {
        std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.4f,%.4f\n", b.x, b.y, b.w, b.h);
        out << buf;
    }
}

void write_curve(const fs::path& path, std::span<const double> curve, bool success) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write " + path.string());
    out << "threshold,value\n";
    char buf[96];
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double th = success ? success_threshold(static_cast<int>(i)) : static_cast<double>(i);
        std::snprintf(buf, sizeof buf, "%.2f,%.17g\n", th, curve[i]);
        out << buf;
    }
}

std::string summary_json(const OpeReport& report, bool include_timing) {
    using json = nlohmann::ordered_json;
    json seqs = json::array();
    for (const auto& s : report.sequences) {
        json row;
        row["name"] = s.name;
        if (s.error) {
            row["error"] = *s.error;
        } else {
            row["frames"] = s.frames;
            row["precision_20"] = s.precision20;
            row["auc"] = s.auc;
            row["zero_response_frames"] = s.zero_response_frames;
            if (include_timing) {
                row["fps"] = s.fps;
                row["seconds"] = s.seconds;
            }
        }
        seqs.push_back(std::move(row));
    }
    json mean;
    mean["precision_20"] = report.mean_precision20;
    mean["auc"] = report.mean_auc;
    if (include_timing)
        mean["fps"] = report.mean_fps;
    json root;
    root["sequences"] = std::move(seqs);
    root["mean"] = std::move(mean);
    return root.dump(2) + "\n";
}

void write_report(const fs::path& out, const OpeReport& report) {
    fs::create_directories(out / "boxes");
    fs::create_directories(out / "curves");
    for (const auto& s : report.sequences) {
        if (s.error)
            continue;
        write_boxes(out / "boxes" / (s.name + ".txt"), s.boxes);
        write_curve(out / "curves" / (s.name + "_precision.csv"), s.precision, false);
        write_curve(out / "curves" / (s.name + "_success.csv"), s.success, true);
    }
    write_curve(out / "curves" / "mean_precision.csv", report.mean_precision, false);
    write_curve(out / "curves" / "mean_success.csv", report.mean_success, true);
    std::ofstream js(out / "summary.json", std::ios::binary);
    if (!js)
        throw DataError("cannot write " + (out / "summary.json").string());
    js << summary_json(report);
}

}  // namespace drtrack
