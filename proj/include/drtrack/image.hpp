#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace drtrack {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend bool operator==(const Point2&, const Point2&) = default;
};

struct Size2 {
    int width = 0;
    int height = 0;

    friend bool operator==(const Size2&, const Size2&) = default;
};

/// Axis-aligned box in pixels, (x, y) is the top-left corner.
struct BBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    Point2 center() const { return {x + w / 2.0, y + h / 2.0}; }
    bool valid() const { return w > 0.0 && h > 0.0; }
    static BBox from_center(Point2 c, double w, double h) { return {c.x - w / 2.0, c.y - h / 2.0, w, h}; }

    friend bool operator==(const BBox&, const BBox&) = default;
};

/// 8-bit row-major image with 1 (gray) or 3 (RGB) interleaved channels.
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels, std::uint8_t fill = 0);
    Image(int width, int height, int channels, std::vector<std::uint8_t> data);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    Size2 size() const { return {width_, height_}; }
    bool empty() const { return data_.empty(); }

    std::uint8_t& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
    std::uint8_t at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

    const std::vector<std::uint8_t>& data() const { return data_; }
    std::vector<std::uint8_t>& data() { return data_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t index(int x, int y, int c) const {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) *
                   static_cast<std::size_t>(channels_) +
               static_cast<std::size_t>(c);
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Crop a `size`-shaped window centered at `center`. Pixels outside the image
/// replicate the nearest border pixel, so any center (even far outside) is valid.
/// For even sizes the window spans [center - size/2, center + size/2).
Image extract_patch(const Image& img, Point2 center, Size2 size);

/// Bilinear resampling with pixel-center alignment and no prefilter.
Image resize(const Image& img, Size2 new_size);

/// Bilinear samples of the `width` x `height` frame region centered at
/// `center` (fractional extents allowed), on an `out_size` grid. Borders replicate.
Image sample_patch(const Image& img, Point2 center, double width, double height, Size2 out_size);

/// Luma conversion (BT.601 weights); gray input is returned unchanged.
Image to_gray(const Image& img);

/// Decode a still image (JPEG, PNG, ...). Grayscale files stay 1-channel,
/// everything else becomes RGB.
Image load_image(const std::filesystem::path& path);

void save_image(const Image& img, const std::filesystem::path& path);

/// Draws a `thickness`-px rectangle outline and stamps `label` in the top-left corner.
void draw_box(Image& img, const BBox& box, int thickness, const std::string& label);

}  // namespace drtrack
