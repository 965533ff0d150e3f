#include "drtrack/image.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "drtrack/error.hpp"

namespace drtrack {

Image::Image(int width, int height, int channels, std::uint8_t fill)
    : Image(width, height, channels,
            std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                          static_cast<std::size_t>(std::max(height, 0)) *
                                          static_cast<std::size_t>(std::max(channels, 0)),
                                      fill)) {}

Image::Image(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    if (width <= 0 || height <= 0)
        throw ShapeError("image dimensions must be positive");
    if (channels != 1 && channels != 3)
        throw ShapeError("image must have 1 or 3 channels, got " + std::to_string(channels));
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                            static_cast<std::size_t>(channels))
        throw ShapeError("image buffer length does not match width*height*channels");
}

Image extract_patch(const Image& img, Point2 center, Size2 size) {
    if (size.width <= 0 || size.height <= 0)
        throw ShapeError("patch size must be positive");
    const int ch = img.channels();
    const auto x0 = static_cast<long>(std::floor(center.x - size.width / 2.0 + 0.5));
    const auto y0 = static_cast<long>(std::floor(center.y - size.height / 2.0 + 0.5));
    const long max_x = img.width() - 1;
    const long max_y = img.height() - 1;

    std::vector<int> xs(static_cast<std::size_t>(size.width));
    for (int i = 0; i < size.width; ++i)
        xs[static_cast<std::size_t>(i)] = static_cast<int>(std::clamp(x0 + i, 0L, max_x));

    Image out(size.width, size.height, ch);
    for (int j = 0; j < size.height; ++j) {
        const int sy = static_cast<int>(std::clamp(y0 + j, 0L, max_y));
        for (int i = 0; i < size.width; ++i) {
            const int sx = xs[static_cast<std::size_t>(i)];
            for (int c = 0; c < ch; ++c)
                out.at(i, j, c) = img.at(sx, sy, c);
        }
    }
    return out;
}

namespace {

struct Tap {
    int lo;
    int hi;
    double frac;
};

std::vector<Tap> bilinear_taps(int src, int dst) {
    std::vector<Tap> taps(static_cast<std::size_t>(dst));
    const double ratio = static_cast<double>(src) / dst;
    for (int i = 0; i < dst; ++i) {
        double s = (i + 0.5) * ratio - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(src - 1));
        const int lo = static_cast<int>(std::floor(s));
        const int hi = std::min(lo + 1, src - 1);
        taps[static_cast<std::size_t>(i)] = {lo, hi, s - lo};
    }
    return taps;
}

}  // namespace

Image resize(const Image& img, Size2 new_size) {
    if (new_size.width <= 0 || new_size.height <= 0)
        throw ShapeError("resize target must be positive");
    if (new_size == img.size())
        return img;
    const auto tx = bilinear_taps(img.width(), new_size.width);
    const auto ty = bilinear_taps(img.height(), new_size.height);
    const int ch = img.channels();
    Image out(new_size.width, new_size.height, ch);
    for (int j = 0; j < new_size.height; ++j) {
        const Tap& vy = ty[static_cast<std::size_t>(j)];
        for (int i = 0; i < new_size.width; ++i) {
            const Tap& vx = tx[static_cast<std::size_t>(i)];
            for (int c = 0; c < ch; ++c) {
                const double top = img.at(vx.lo, vy.lo, c) * (1.0 - vx.frac) + img.at(vx.hi, vy.lo, c) * vx.frac;
                const double bot = img.at(vx.lo, vy.hi, c) * (1.0 - vx.frac) + img.at(vx.hi, vy.hi, c) * vx.frac;
                const double v = top * (1.0 - vy.frac) + bot * vy.frac;
                out.at(i, j, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
            }
        }
    }
    return out;
}

Image sample_patch(const Image& img, Point2 center, double width, double height, Size2 out_size) {
    if (out_size.width <= 0 || out_size.height <= 0 || !(width > 0.0) || !(height > 0.0))
        throw ShapeError("sample_patch: sizes must be positive");
    const int ch = img.channels();
    const double sx = width / out_size.width;
    const double sy = height / out_size.height;
    auto taps = [](double origin, double step, int n, int limit) {
        std::vector<Tap> t(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double u = origin + (i + 0.5) * step - 0.5;
            const double f = std::floor(u);
            const auto lo = static_cast<long>(f);
            t[static_cast<std::size_t>(i)] = {static_cast<int>(std::clamp(lo, 0L, static_cast<long>(limit - 1))),
                                              static_cast<int>(std::clamp(lo + 1, 0L, static_cast<long>(limit - 1))),
                                              u - f};
        }
        return t;
    };
    const auto tx = taps(center.x - width / 2.0, sx, out_size.width, img.width());
    const auto ty = taps(center.y - height / 2.0, sy, out_size.height, img.height());
    Image out(out_size.width, out_size.height, ch);
    for (int j = 0; j < out_size.height; ++j) {
        const Tap& vy = ty[static_cast<std::size_t>(j)];
        for (int i = 0; i < out_size.width; ++i) {
            const Tap& vx = tx[static_cast<std::size_t>(i)];
            for (int c = 0; c < ch; ++c) {
                const double top = img.at(vx.lo, vy.lo, c) * (1.0 - vx.frac) + img.at(vx.hi, vy.lo, c) * vx.frac;
                const double bot = img.at(vx.lo, vy.hi, c) * (1.0 - vx.frac) + img.at(vx.hi, vy.hi, c) * vx.frac;
                const double v = top * (1.0 - vy.frac) + bot * vy.frac;
                out.at(i, j, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
            }
        }
    }
    return out;
}

Image to_gray(const Image& img) {
    if (img.channels() == 1)
        return img;
    Image out(img.width(), img.height(), 1);
    const auto& src = img.data();
    auto& dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const double v = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
        dst[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
    return out;
}

Image load_image(const std::filesystem::path& path) {
    cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (m.empty())
        throw DataError("cannot decode image: " + path.string());
    if (m.depth() != CV_8U)
        m.convertTo(m, CV_8U);
    if (m.channels() == 1) {
        // stays gray
    } else if (m.channels() == 4) {
        cv::cvtColor(m, m, cv::COLOR_BGRA2RGB);
    } else {
        cv::cvtColor(m, m, cv::COLOR_BGR2RGB);
    }
    if (!m.isContinuous())
        m = m.clone();
    std::vector<std::uint8_t> buf(m.datastart, m.dataend);
    return Image(m.cols, m.rows, m.channels(), std::move(buf));
}

void save_image(const Image& img, const std::filesystem::path& path) {
    cv::Mat m(img.height(), img.width(), img.channels() == 1 ? CV_8UC1 : CV_8UC3,
              const_cast<std::uint8_t*>(img.data().data()));
    cv::Mat out;
    if (img.channels() == 3)
        cv::cvtColor(m, out, cv::COLOR_RGB2BGR);
    else
        out = m;
    if (!cv::imwrite(path.string(), out))
        throw DataError("cannot write image: " + path.string());
}

void draw_box(Image& img, const BBox& box, int thickness, const std::string& label) {
    if (img.channels() == 1) {
        std::vector<std::uint8_t> rgb(img.data().size() * 3);
        for (std::size_t i = 0; i < img.data().size(); ++i)
            rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = img.data()[i];
        img = Image(img.width(), img.height(), 3, std::move(rgb));
    }
    cv::Mat m(img.height(), img.width(), CV_8UC3, img.data().data());
    const cv::Scalar red(255, 0, 0);
    cv::rectangle(m, cv::Point(static_cast<int>(std::lround(box.x)), static_cast<int>(std::lround(box.y))),
                  cv::Point(static_cast<int>(std::lround(box.x + box.w)), static_cast<int>(std::lround(box.y + box.h))),
                  red, thickness);
    if (!label.empty())
        cv::putText(m, label, cv::Point(4, 16), cv::FONT_HERSHEY_SIMPLEX, 0.5, red, 1);
}

}  // namespace drtrack
