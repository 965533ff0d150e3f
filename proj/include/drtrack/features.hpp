#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "drtrack/image.hpp"

namespace drtrack {

/// Cell-gridded multi-channel feature map. Storage is channel-major: every
/// channel is a contiguous rows x cols row-major plane.
class FeatureMap {
public:
    FeatureMap() = default;
    FeatureMap(int rows, int cols, int channels, int cell_size = 1);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int channels() const { return channels_; }
    int cell_size() const { return cell_size_; }
    std::size_t plane_size() const { return static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_); }

    double& at(int r, int c, int ch) { return data_[offset(r, c, ch)]; }
    double at(int r, int c, int ch) const { return data_[offset(r, c, ch)]; }

    std::span<double> channel(int ch) { return {data_.data() + static_cast<std::size_t>(ch) * plane_size(), plane_size()}; }
    std::span<const double> channel(int ch) const {
        return {data_.data() + static_cast<std::size_t>(ch) * plane_size(), plane_size()};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_grid(const FeatureMap& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

private:
    std::size_t offset(int r, int c, int ch) const {
        return static_cast<std::size_t>(ch) * plane_size() + static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
               static_cast<std::size_t>(c);
    }

    int rows_ = 0;
    int cols_ = 0;
    int channels_ = 0;
    int cell_size_ = 1;
    std::vector<double> data_;
};

/// Color-names lookup: 32768 rows indexed by r/8 + 32*(g/8) + 1024*(b/8).
class CnTable {
public:
    static constexpr int kRows = 32768;

    CnTable() = default;
    /// `values` holds kRows * width probabilities, row-major.
    CnTable(int width, std::vector<double> values);

    /// Whitespace-separated text, one row per line: the quantized RGB index
    /// followed by the 10 or 11 probability columns.
    static CnTable load(const std::filesystem::path& path);

    int width() const { return width_; }
    bool empty() const { return width_ == 0; }
    std::span<const double> row(int index) const {
        return {values_.data() + static_cast<std::size_t>(index) * static_cast<std::size_t>(width_),
                static_cast<std::size_t>(width_)};
    }
    static int index_of(std::uint8_t r, std::uint8_t g, std::uint8_t b) { return (r >> 3) + 32 * (g >> 3) + 1024 * (b >> 3); }

private:
    int width_ = 0;
    std::vector<double> values_;
};

inline constexpr int kHogChannels = 31;

/// Mean cell intensity mapped to [-0.5, 0.5].
FeatureMap extract_gray(const Image& patch, int cell_size);

/// 31-channel Felzenszwalb HOG: 18 signed orientations, 9 unsigned
/// orientations and 4 texture (block energy) channels, truncated at 0.2.
FeatureMap extract_hog(const Image& patch, int cell_size);

/// Cell-averaged color-name probabilities. A gray patch or an empty table
/// yields a 0-channel map on the right grid.
FeatureMap extract_cn(const Image& patch, int cell_size, const CnTable& table);

/// Channel concatenation in argument order.
FeatureMap compose(std::span<const FeatureMap> maps);

/// Separable Hann window of the given grid shape, row-major.
std::vector<double> hann_window(int rows, int cols);

/// Multiplies every channel by the Hann window of the map's grid.
FeatureMap apply_window(FeatureMap fm);

/// Which channels to stack; the CN table is optional.
struct FeatureSettings {
    int cell_size = 4;
    bool use_gray = true;
    bool use_hog = true;
    bool use_cn = true;
    const CnTable* cn_table = nullptr;
};

/// gray + HOG + CN (when enabled and applicable) stacked in that order, unwindowed.
FeatureMap extract_features(const Image& patch, const FeatureSettings& settings);

/// Rounds a pixel length to the nearest positive multiple of the cell size.
int round_to_cells(double pixels, int cell_size);

}  // namespace drtrack
