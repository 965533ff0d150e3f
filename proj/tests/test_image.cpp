#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include "drtrack/error.hpp"
#include "drtrack/image.hpp"
#include "support.hpp"

using namespace drtrack;

namespace {

// 4x4 ramp: value 10*y + x.
Image gradient4() {
    Image img(4, 4, 1);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x)
            img.at(x, y) = static_cast<std::uint8_t>(10 * y + x);
    return img;
}

}  // namespace

TEST_CASE("extract_patch at the image center with the image size is the identity") {
    std::mt19937 rng(1);
    for (auto [w, h] : {std::pair{4, 4}, std::pair{7, 5}, std::pair{16, 9}}) {
        const Image img = testing::random_image(rng, w, h, 3);
        CHECK(extract_patch(img, {w / 2.0, h / 2.0}, img.size()) == img);
    }
}

TEST_CASE("extract_patch replicates a single pixel") {
    Image one(1, 1, 1, 77);
    for (Point2 c : {Point2{0, 0}, Point2{-30.5, 12}, Point2{400, -400}}) {
        const Image p = extract_patch(one, c, {3, 3});
        CHECK(p.width() == 3);
        CHECK(p.height() == 3);
        CHECK(std::all_of(p.data().begin(), p.data().end(), [](auto v) { return v == 77; }));
    }
}

TEST_CASE("extract_patch corner crop clamps indices") {
    const Image img = gradient4();
    // Window [-1, 1) in both axes: row/column -1 replicate row/column 0.
    const Image p = extract_patch(img, {0.0, 0.0}, {2, 2});
    CHECK(p.at(0, 0) == 0);
    CHECK(p.at(1, 0) == 0);
    CHECK(p.at(0, 1) == 0);
    CHECK(p.at(1, 1) == 0);
    // Window [-1, 2) x [0, 3) on a 3x3 crop centered at (0.5, 1.5).
    const Image q = extract_patch(img, {0.5, 1.5}, {3, 3});
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            const int sx = std::clamp(i - 1, 0, 3);
            const int sy = std::clamp(j, 0, 3);
            CHECK(q.at(i, j) == 10 * sy + sx);
        }
}

TEST_CASE("extract_patch is translation consistent in the interior") {
    std::mt19937 rng(2);
    const Image img = testing::random_image(rng, 40, 30, 1);
    const Image a = extract_patch(img, {20, 15}, {8, 6});
    const Image b = extract_patch(img, {23, 13}, {8, 6});
    // Moving the center by (+3, -2) moves the contents by (-3, +2).
    for (int j = 2; j < 6; ++j)
        for (int i = 0; i + 3 < 8; ++i)
            CHECK(b.at(i, j) == a.at(i + 3, j - 2));
}

TEST_CASE("extract_patch never reads out of bounds") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> far(-1e5, 1e5);
    const Image img = testing::random_image(rng, 9, 7, 3);
    for (int i = 0; i < 200; ++i) {
        const Image p = extract_patch(img, {far(rng), far(rng)}, {5, 4});
        CHECK(p.size() == Size2{5, 4});
    }
    CHECK_THROWS_AS(extract_patch(img, {0, 0}, {0, 3}), ShapeError);
}

TEST_CASE("resize identity and constants") {
    std::mt19937 rng(4);
    const Image img = testing::random_image(rng, 13, 11, 3);
    CHECK(resize(img, img.size()) == img);
    const Image flat(10, 6, 1, 93);
    for (Size2 s : {Size2{1, 1}, Size2{3, 17}, Size2{41, 23}}) {
        const Image r = resize(flat, s);
        CHECK(std::all_of(r.data().begin(), r.data().end(), [](auto v) { return v == 93; }));
    }
}

TEST_CASE("checkerboard upsampled to 3x3 has the corner mean at the center") {
    Image cb(2, 2, 1);
    cb.at(0, 0) = 0;
    cb.at(1, 0) = 200;
    cb.at(0, 1) = 200;
    cb.at(1, 1) = 0;
    // Output pixel 1 maps to source coordinate (1.5 * 2/3) - 0.5 = 0.5 on both axes.
    CHECK(resize(cb, {3, 3}).at(1, 1) == 100);
}

TEST_CASE("sample_patch over the whole image at native resolution is the identity") {
    std::mt19937 rng(5);
    const Image img = testing::random_image(rng, 12, 10, 1);
    CHECK(sample_patch(img, {6, 5}, 12, 10, {12, 10}) == img);
}

TEST_CASE("sample_patch distinguishes fractional extents") {
    Image ramp(64, 8, 1);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 64; ++x)
            ramp.at(x, y) = static_cast<std::uint8_t>(4 * x);
    // Extents 24 and 24.48 floor to the same integer; the samples must still differ.
    const Image a = sample_patch(ramp, {32, 4}, 24.0, 4.0, {24, 4});
    const Image b = sample_patch(ramp, {32, 4}, 24.48, 4.0, {24, 4});
    CHECK(a != b);
    // Bilinear sample at pixel-center alignment: x = 32 - 12 + 0.5 - 0.5 = 20 for the first column.
    CHECK(a.at(0, 0) == 80);
}

TEST_CASE("to_gray uses BT.601 luma") {
    Image rgb(1, 1, 3);
    rgb.at(0, 0, 0) = 200;
    rgb.at(0, 0, 1) = 100;
    rgb.at(0, 0, 2) = 50;
    const double expect = 0.299 * 200 + 0.587 * 100 + 0.114 * 50;
    CHECK(to_gray(rgb).at(0, 0) == static_cast<int>(std::lround(expect)));
}

TEST_CASE("PNG round trip and decode errors") {
    std::mt19937 rng(6);
    const auto dir = std::filesystem::temp_directory_path() / "drtrack_test_image";
    std::filesystem::create_directories(dir);
    const Image gray = testing::random_image(rng, 17, 9, 1);
    const Image rgb = testing::random_image(rng, 17, 9, 3);
    save_image(gray, dir / "g.png");
    save_image(rgb, dir / "c.png");
    CHECK(load_image(dir / "g.png") == gray);
    CHECK(load_image(dir / "c.png") == rgb);
    CHECK_THROWS_AS(load_image(dir / "missing.png"), DataError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("draw_box touches only the outline and the label corner") {
    Image img(60, 40, 3, 0);
    draw_box(img, {10, 10, 30, 20}, 2, "#1");
    CHECK(img.at(10, 20, 0) + img.at(10, 20, 1) + img.at(10, 20, 2) > 0);
    CHECK(img.at(25, 20, 0) == 0);
    CHECK(img.at(55, 35, 0) == 0);
}
