#include "drtrack/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "drtrack/error.hpp"

namespace drtrack {

FeatureMap::FeatureMap(int rows, int cols, int channels, int cell_size)
    : rows_(rows), cols_(cols), channels_(channels), cell_size_(cell_size) {
    if (rows < 0 || cols < 0 || channels < 0 || cell_size <= 0)
        throw ShapeError("invalid feature map shape");
    data_.assign(static_cast<std::size_t>(channels) * plane_size(), 0.0);
}

CnTable::CnTable(int width, std::vector<double> values) : width_(width), values_(std::move(values)) {
    if (width <= 0)
        throw DataError("color-names table must have at least one column");
    if (values_.size() != static_cast<std::size_t>(kRows) * static_cast<std::size_t>(width))
        throw DataError("color-names table must have exactly 32768 rows");
    for (double v : values_)
        if (!std::isfinite(v))
            throw DataError("color-names table contains a non-finite value");
}

CnTable CnTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open color-names table: " + path.string());
    std::vector<double> values;
    int width = -1;
    int row = 0;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::vector<double> cols;
        double v = 0.0;
        while (ss >> v)
            cols.push_back(v);
        if (!ss.eof())
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": unparseable value");
        if (cols.empty())
            continue;
        if (row >= kRows)
            throw DataError(path.string() + ": more than 32768 rows");
        if (cols.size() != 11 && cols.size() != 12)
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": expected an index followed by 10 or 11 probabilities");
        if (cols.front() != static_cast<double>(row))
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": row index out of order");
        const int w = static_cast<int>(cols.size()) - 1;
        if (width < 0)
            width = w;
        else if (w != width)
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": inconsistent column count");
        values.insert(values.end(), cols.begin() + 1, cols.end());
        ++row;
    }
    if (row != kRows)
        throw DataError(path.string() + ": expected 32768 rows, found " + std::to_string(row));
    return CnTable(width, std::move(values));
}

int round_to_cells(double pixels, int cell_size) {
    const long cells = std::lround(pixels / cell_size);
    return static_cast<int>(std::max(1L, cells)) * cell_size;
}

namespace {

void check_tiling(const Image& patch, int cell_size) {
    if (cell_size <= 0)
        throw ShapeError("cell size must be positive");
    if (patch.width() % cell_size != 0 || patch.height() % cell_size != 0)
        throw ShapeError("patch " + std::to_string(patch.width()) + "x" + std::to_string(patch.height()) +
                         " is not divisible by cell size " + std::to_string(cell_size));
}

constexpr int kOrientations = 18;
constexpr double kTruncation = 0.2;
constexpr double kNormEps = 1e-4;
constexpr double kTextureWeight = 0.2357;

}  // namespace

FeatureMap extract_gray(const Image& patch, int cell_size) {
    check_tiling(patch, cell_size);
    const int rows = patch.height() / cell_size;
    const int cols = patch.width() / cell_size;
    FeatureMap fm(rows, cols, 1, cell_size);
    const double norm = 1.0 / (255.0 * cell_size * cell_size);
    for (int y = 0; y < patch.height(); ++y) {
        for (int x = 0; x < patch.width(); ++x) {
            double v = 0.0;
            if (patch.channels() == 1)
                v = patch.at(x, y);
            else
                v = 0.299 * patch.at(x, y, 0) + 0.587 * patch.at(x, y, 1) + 0.114 * patch.at(x, y, 2);
            fm.at(y / cell_size, x / cell_size, 0) += v * norm;
        }
    }
    for (double& v : fm.data())
        v -= 0.5;
    return fm;
}

FeatureMap extract_hog(const Image& patch, int cell_size) {
    check_tiling(patch, cell_size);
    const int w = patch.width();
    const int h = patch.height();
    const int rows = h / cell_size;
    const int cols = w / cell_size;
    const int nch = patch.channels();

    // Orientation histograms per cell, 18 signed bins, linear interpolation
    // between neighbouring bins.
    std::vector<double> hist(static_cast<std::size_t>(rows) * cols * kOrientations, 0.0);
    const double bin_width = 2.0 * std::numbers::pi / kOrientations;
    for (int y = 0; y < h; ++y) {
        const int ym = std::max(y - 1, 0);
        const int yp = std::min(y + 1, h - 1);
        double* cell_row = hist.data() + static_cast<std::size_t>(y / cell_size) * cols * kOrientations;
        for (int x = 0; x < w; ++x) {
            const int xm = std::max(x - 1, 0);
            const int xp = std::min(x + 1, w - 1);
            double best_dx = 0.0;
            double best_dy = 0.0;
            double best_mag2 = -1.0;
            for (int c = 0; c < nch; ++c) {
                const double dx = (static_cast<double>(patch.at(xp, y, c)) - patch.at(xm, y, c)) / 255.0;
                const double dy = (static_cast<double>(patch.at(x, yp, c)) - patch.at(x, ym, c)) / 255.0;
                const double mag2 = dx * dx + dy * dy;
                if (mag2 > best_mag2) {
                    best_mag2 = mag2;
                    best_dx = dx;
                    best_dy = dy;
                }
            }
            if (best_mag2 <= 0.0)
                continue;
            const double mag = std::sqrt(best_mag2);
            double angle = std::atan2(best_dy, best_dx);
            if (angle < 0.0)
                angle += 2.0 * std::numbers::pi;
            const double pos = angle / bin_width;
            const double fl = std::floor(pos);
            const double frac = pos - fl;
            const int b0 = static_cast<int>(fl) % kOrientations;
            const int b1 = (b0 + 1) % kOrientations;
            double* bins = cell_row + static_cast<std::size_t>(x / cell_size) * kOrientations;
            bins[b0] += mag * (1.0 - frac);
            bins[b1] += mag * frac;
        }
    }

    // Cell energy of the contrast-insensitive histogram.
    std::vector<double> energy(static_cast<std::size_t>(rows) * cols, 0.0);
    for (std::size_t i = 0; i < energy.size(); ++i) {
        const double* bins = hist.data() + i * kOrientations;
        double e = 0.0;
        for (int o = 0; o < kOrientations / 2; ++o) {
            const double s = bins[o] + bins[o + kOrientations / 2];
            e += s * s;
        }
        energy[i] = e;
    }
    auto energy_at = [&](int r, int c) {
        r = std::clamp(r, 0, rows - 1);
        c = std::clamp(c, 0, cols - 1);
        return energy[static_cast<std::size_t>(r) * cols + c];
    };

    FeatureMap fm(rows, cols, kHogChannels, cell_size);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            // The four 2x2 blocks containing this cell.
            std::array<double, 4> norms{};
            int k = 0;
            for (int dr : {-1, 1}) {
                for (int dc : {-1, 1}) {
                    const double e = energy_at(r, c) + energy_at(r + dr, c) + energy_at(r, c + dc) + energy_at(r + dr, c + dc);
                    norms[k++] = 1.0 / std::sqrt(e + kNormEps);
                }
            }
            const double* bins = hist.data() + (static_cast<std::size_t>(r) * cols + c) * kOrientations;
            std::array<double, 4> texture{};
            for (int o = 0; o < kOrientations; ++o) {
                double sum = 0.0;
                for (int b = 0; b < 4; ++b) {
                    const double v = std::min(bins[o] * norms[b], kTruncation);
                    sum += v;
                    texture[b] += v;
                }
                fm.at(r, c, o) = 0.5 * sum;
            }
            for (int o = 0; o < kOrientations / 2; ++o) {
                const double un = bins[o] + bins[o + kOrientations / 2];
                double sum = 0.0;
                for (int b = 0; b < 4; ++b)
                    sum += std::min(un * norms[b], kTruncation);
                fm.at(r, c, kOrientations + o) = 0.5 * sum;
            }
            for (int b = 0; b < 4; ++b)
                fm.at(r, c, kOrientations + kOrientations / 2 + b) = kTextureWeight * texture[b];
        }
    }
    return fm;
}

FeatureMap extract_cn(const Image& patch, int cell_size, const CnTable& table) {
    check_tiling(patch, cell_size);
    const int rows = patch.height() / cell_size;
    const int cols = patch.width() / cell_size;
    if (patch.channels() != 3 || table.empty())
        return FeatureMap(rows, cols, 0, cell_size);
    FeatureMap fm(rows, cols, table.width(), cell_size);
    const double norm = 1.0 / (cell_size * cell_size);
    for (int y = 0; y < patch.height(); ++y) {
        for (int x = 0; x < patch.width(); ++x) {
            const auto row = table.row(CnTable::index_of(patch.at(x, y, 0), patch.at(x, y, 1), patch.at(x, y, 2)));
            for (int ch = 0; ch < table.width(); ++ch)
                fm.at(y / cell_size, x / cell_size, ch) += row[static_cast<std::size_t>(ch)] * norm;
        }
    }
    return fm;
}

FeatureMap compose(std::span<const FeatureMap> maps) {
    if (maps.empty())
        throw ShapeError("compose needs at least one feature map");
    const FeatureMap& first = maps.front();
    int channels = 0;
    for (const auto& m : maps) {
        if (!m.same_grid(first) || m.cell_size() != first.cell_size())
            throw ShapeError("compose: feature maps disagree on grid shape or cell size");
        channels += m.channels();
    }
    FeatureMap out(first.rows(), first.cols(), channels, first.cell_size());
    auto dst = out.data().begin();
    for (const auto& m : maps)
        dst = std::copy(m.data().begin(), m.data().end(), dst);
    return out;
}

std::vector<double> hann_window(int rows, int cols) {
    auto hann = [](int n) {
        std::vector<double> w(static_cast<std::size_t>(n), 1.0);
        if (n > 1)
            for (int i = 0; i < n; ++i)
                w[static_cast<std::size_t>(i)] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1)));
        return w;
    };
    const auto wr = hann(rows);
    const auto wc = hann(cols);
    std::vector<double> out(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            out[static_cast<std::size_t>(r) * cols + c] = wr[static_cast<std::size_t>(r)] * wc[static_cast<std::size_t>(c)];
    return out;
}

FeatureMap apply_window(FeatureMap fm) {
    const auto win = hann_window(fm.rows(), fm.cols());
    for (int ch = 0; ch < fm.channels(); ++ch) {
        auto plane = fm.channel(ch);
        for (std::size_t i = 0; i < plane.size(); ++i)
            plane[i] *= win[i];
    }
    return fm;
}

FeatureMap extract_features(const Image& patch, const FeatureSettings& settings) {
    std::vector<FeatureMap> maps;
    if (settings.use_gray)
        maps.push_back(extract_gray(patch, settings.cell_size));
    if (settings.use_hog)
        maps.push_back(extract_hog(patch, settings.cell_size));
    if (settings.use_cn && settings.cn_table != nullptr)
        maps.push_back(extract_cn(patch, settings.cell_size, *settings.cn_table));
    if (maps.empty())
        throw ShapeError("no feature channels enabled");
    return compose(maps);
}

}  // namespace drtrack
