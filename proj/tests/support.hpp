#pragma once

// Test-only helpers: seeded generators and brute-force oracles that share no
// code path with the library routines they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "drtrack/features.hpp"
#include "drtrack/fourier.hpp"
#include "drtrack/image.hpp"
#include "drtrack/regression.hpp"

namespace drtrack::testing {

inline FeatureMap random_map(std::mt19937& rng, int rows, int cols, int channels, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    FeatureMap fm(rows, cols, channels);
    for (double& v : fm.data())
        v = dist(rng);
    return fm;
}

inline Image random_image(std::mt19937& rng, int w, int h, int channels) {
    std::uniform_int_distribution<int> dist(0, 255);
    Image img(w, h, channels);
    for (auto& v : img.data())
        v = static_cast<std::uint8_t>(dist(rng));
    return img;
}

/// r[k] = sum_n a[n + k] b[n], cyclic, O(K^2).
inline std::vector<double> brute_cross_correlation(std::span<const double> a, std::span<const double> b, int rows,
                                                   int cols) {
    std::vector<double> r(a.size(), 0.0);
    for (int kr = 0; kr < rows; ++kr)
        for (int kc = 0; kc < cols; ++kc) {
            double s = 0.0;
            for (int nr = 0; nr < rows; ++nr)
                for (int nc = 0; nc < cols; ++nc)
                    s += a[static_cast<std::size_t>(((nr + kr) % rows) * cols + (nc + kc) % cols)] *
                         b[static_cast<std::size_t>(nr * cols + nc)];
            r[static_cast<std::size_t>(kr * cols + kc)] = s;
        }
    return r;
}

/// Direct O(K^2) DFT of one plane.
inline std::vector<std::complex<double>> brute_dft(std::span<const double> x, int rows, int cols) {
    std::vector<std::complex<double>> out(x.size());
    for (int u = 0; u < rows; ++u)
        for (int v = 0; v < cols; ++v) {
            std::complex<double> s = 0.0;
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c) {
                    const double ang = -2.0 * M_PI * (static_cast<double>(u * r) / rows + static_cast<double>(v * c) / cols);
                    s += x[static_cast<std::size_t>(r * cols + c)] * std::polar(1.0, ang);
                }
            out[static_cast<std::size_t>(u * cols + v)] = s;
        }
    return out;
}

/// Minimizer of the training objective over real filters h (K*C unknowns),
/// built as a dense quadratic in the spatial domain:
///   K/2 |t - sum_c A_c h_c|^2 + theta*K/2 |h - l|^2 + 1/2 |w * h|^2,
/// with (A_c h)[k] = sum_n m_c[n] h[n + k]. Returns h channel-major.
inline Eigen::VectorXd dense_optimum(const FeatureMap& m, const std::vector<double>& t, const FeatureMap& last,
                                     double theta, const Plane& w) {
    const int rows = m.rows();
    const int cols = m.cols();
    const int k = rows * cols;
    const int c = m.channels();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k * c);
    for (int kr = 0; kr < rows; ++kr)
        for (int kc = 0; kc < cols; ++kc)
            for (int ch = 0; ch < c; ++ch)
                for (int nr = 0; nr < rows; ++nr)
                    for (int nc = 0; nc < cols; ++nc) {
                        const int shifted = ((nr + kr) % rows) * cols + (nc + kc) % cols;
                        a(kr * cols + kc, ch * k + shifted) += m.at(nr, nc, ch);
                    }
    Eigen::VectorXd tv(k);
    for (int i = 0; i < k; ++i)
        tv(i) = t[static_cast<std::size_t>(i)];
    Eigen::MatrixXd hess = static_cast<double>(k) * a.transpose() * a;
    Eigen::VectorXd rhs = static_cast<double>(k) * a.transpose() * tv;
    for (int ch = 0; ch < c; ++ch)
        for (int i = 0; i < k; ++i) {
            const int j = ch * k + i;
            hess(j, j) += theta * k + w.data[static_cast<std::size_t>(i)] * w.data[static_cast<std::size_t>(i)];
            if (theta != 0.0)
                rhs(j) += theta * k * last.data()[static_cast<std::size_t>(j)];
        }
    return hess.ldlt().solve(rhs);
}

/// The same objective evaluated directly in the spatial domain.
inline double spatial_objective(const FeatureMap& m, const std::vector<double>& t, const FeatureMap& last,
                                double theta, const Plane& w, std::span<const double> h) {
    const int rows = m.rows();
    const int cols = m.cols();
    const int k = rows * cols;
    double fid = 0.0;
    for (int kr = 0; kr < rows; ++kr)
        for (int kc = 0; kc < cols; ++kc) {
            double y = 0.0;
            for (int ch = 0; ch < m.channels(); ++ch)
                for (int nr = 0; nr < rows; ++nr)
                    for (int nc = 0; nc < cols; ++nc)
                        y += m.at(nr, nc, ch) *
                             h[static_cast<std::size_t>(ch * k + ((nr + kr) % rows) * cols + (nc + kc) % cols)];
            const double e = t[static_cast<std::size_t>(kr * cols + kc)] - y;
            fid += e * e;
        }
    double temporal = 0.0;
    double spatial = 0.0;
    for (int ch = 0; ch < m.channels(); ++ch)
        for (int i = 0; i < k; ++i) {
            const auto j = static_cast<std::size_t>(ch * k + i);
            const double d = h[j] - (theta != 0.0 ? last.data()[j] : 0.0);
            temporal += d * d;
            const double wv = w.data[static_cast<std::size_t>(i)];
            spatial += wv * wv * h[j] * h[j];
        }
    return 0.5 * k * fid + 0.5 * theta * k * temporal + 0.5 * spatial;
}

/// Draws a filled disc with soft edge onto a gray image.
inline void draw_blob(Image& img, double cx, double cy, double radius, int value) {
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const double d = std::hypot(x + 0.5 - cx, y + 0.5 - cy);
            if (d <= radius)
                for (int c = 0; c < img.channels(); ++c)
                    img.at(x, y, c) = static_cast<std::uint8_t>(value);
        }
}

/// Whole-frame translation by whole pixels; uncovered pixels replicate the border.
inline Image shift_image(const Image& img, int dx, int dy) {
    Image out(img.width(), img.height(), img.channels());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < img.channels(); ++c)
                out.at(x, y, c) = img.at(std::clamp(x - dx, 0, img.width() - 1), std::clamp(y - dy, 0, img.height() - 1), c);
    return out;
}

/// Largest normalized response within one cell of where `object` falls on the
/// centered response grid of a detection searched around `search_center`.
inline double response_near(const Plane& response, Point2 search_center, double pixels_per_cell, const BBox& object) {
    const Point2 c = object.center();
    const int cr = response.rows / 2 + static_cast<int>(std::lround((c.y - search_center.y) / pixels_per_cell));
    const int cc = response.cols / 2 + static_cast<int>(std::lround((c.x - search_center.x) / pixels_per_cell));
    double best = -1e300;
    for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
            const int r = cr + dr;
            const int q = cc + dc;
            if (r >= 0 && r < response.rows && q >= 0 && q < response.cols)
                best = std::max(best, response.at(r, q));
        }
    return best;
}

// Response map with random positive values, normalized so the maximum is 1.
inline std::pair<Plane, Cell> random_response(std::mt19937& rng, int rows, int cols) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Plane p(rows, cols);
    for (double& v : p.data)
        v = u(rng) * u(rng);
    const auto it = std::max_element(p.data.begin(), p.data.end());
    const double m = *it;
    for (double& v : p.data)
        v /= m;
    const auto idx = static_cast<int>(it - p.data.begin());
    return {p, Cell{idx / cols, idx % cols}};
}

struct Expected {
    Cell cell;
    double value;
};

// Distractor oracle: shift by hand, scan every cell against its 8 cyclic neighbours, drop the
// target rectangle, sort and keep the first n.
inline std::vector<Expected> oracle(const Plane& r, Cell peak, CellExtent target, int n) {
    const int rows = r.rows;
    const int cols = r.cols;
    const int cr = rows / 2;
    const int cc = cols / 2;
    auto shifted = [&](int i, int j) {
        const int si = ((i - (cr - peak.row)) % rows + rows) % rows;
        const int sj = ((j - (cc - peak.col)) % cols + cols) % cols;
        return r.at(si, sj);
    };
    const int mh = std::min(rows, static_cast<int>(std::ceil(target.rows - 1e-9)));
    const int mw = std::min(cols, static_cast<int>(std::ceil(target.cols - 1e-9)));
    const int top = std::clamp(cr - mh / 2, 0, rows - mh);
    const int left = std::clamp(cc - mw / 2, 0, cols - mw);
    std::vector<std::tuple<double, int, int>> found;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const double v = shifted(i, j);
            bool strict = true;
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj)
                    if ((di != 0 || dj != 0) &&
                        !(v > shifted(((i + di) % rows + rows) % rows, ((j + dj) % cols + cols) % cols)))
                        strict = false;
            const bool inside = i >= top && i < top + mh && j >= left && j < left + mw;
            if (strict && !inside && v > 0.0)
                found.emplace_back(-v, i, j);
        }
    std::sort(found.begin(), found.end());
    std::vector<Expected> out;
    for (std::size_t k = 0; k < found.size() && static_cast<int>(k) < n; ++k)
        out.push_back({{std::get<1>(found[k]), std::get<2>(found[k])}, -std::get<0>(found[k])});
    return out;
}

/// Fresh scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("drtrack_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace drtrack::testing
