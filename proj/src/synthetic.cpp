#include "drtrack/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "drtrack/error.hpp"

namespace drtrack {

namespace {

constexpr int kTextureGrid = 6;

// Bilinear lookup into a g x g lattice spanning [0,1]^2.
double lattice(const std::vector<double>& v, int g, double u, double w) {
    const double fx = std::clamp(u, 0.0, 1.0) * (g - 1);
    const double fy = std::clamp(w, 0.0, 1.0) * (g - 1);
    const int x0 = std::min(static_cast<int>(fx), g - 2);
    const int y0 = std::min(static_cast<int>(fy), g - 2);
    const double ax = fx - x0;
    const double ay = fy - y0;
    auto at = [&](int x, int y) { return v[static_cast<std::size_t>(y * g + x)]; };
    return (1 - ay) * ((1 - ax) * at(x0, y0) + ax * at(x0 + 1, y0)) + ay * ((1 - ax) * at(x0, y0 + 1) + ax * at(x0 + 1, y0 + 1));
}

std::vector<double> texture_lattice(std::uint32_t seed) {
    std::mt19937 rng(seed * 2654435761u + 17u);
    std::uniform_real_distribution<double> dist(20.0, 240.0);
    std::vector<double> v(kTextureGrid * kTextureGrid);
    for (double& x : v)
        x = dist(rng);
    return v;
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

SyntheticSequence single_object(const std::string& name, const MotionSpec& spec, auto&& box_at) {
    SceneRenderer renderer(spec.width, spec.height, spec.seed, spec.channels);
    SyntheticSequence seq;
    seq.name = name;
    for (int f = 0; f < spec.frames; ++f) {
        const BBox b = box_at(f);
        seq.frames.push_back(renderer.render({{b, spec.seed + 1000u}}));
        seq.groundtruth.push_back(b);
        seq.distractors.emplace_back();
    }
    return seq;
}

}  // namespace

SceneRenderer::SceneRenderer(int width, int height, std::uint32_t background_seed, int channels)
    : width_(width), height_(height), channels_(channels), background_(width, height, channels) {
    if (width < 8 || height < 8)
        throw DataError("synthetic frames must be at least 8x8");
    // Coarse smooth variation plus fine grain, so the background carries some
    // gradient energy without looking like the objects.
    std::mt19937 rng(background_seed);
    constexpr int kCoarse = 16;
    const int gx = width / kCoarse + 2;
    const int gy = height / kCoarse + 2;
    std::uniform_real_distribution<double> coarse(70.0, 130.0);
    std::vector<double> grid(static_cast<std::size_t>(gx * gy));
    for (double& v : grid)
        v = coarse(rng);
    std::uniform_real_distribution<double> grain(-6.0, 6.0);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const double fx = static_cast<double>(x) / kCoarse;
            const double fy = static_cast<double>(y) / kCoarse;
            const int x0 = static_cast<int>(fx);
            const int y0 = static_cast<int>(fy);
            const double ax = fx - x0;
            const double ay = fy - y0;
            auto at = [&](int i, int j) { return grid[static_cast<std::size_t>(j * gx + i)]; };
            const double base = (1 - ay) * ((1 - ax) * at(x0, y0) + ax * at(x0 + 1, y0)) +
                                ay * ((1 - ax) * at(x0, y0 + 1) + ax * at(x0 + 1, y0 + 1));
            const double g = grain(rng);
            for (int c = 0; c < channels; ++c)
                background_.at(x, y, c) = to_byte(base + g + 10.0 * c);
        }
}

Image SceneRenderer::render(const std::vector<SyntheticObject>& objects) const {
    Image img = background_;
    for (const auto& obj : objects) {
        const auto tex = texture_lattice(obj.texture_seed);
        const BBox& b = obj.box;
        const int x0 = std::max(0, static_cast<int>(std::floor(b.x)));
        const int y0 = std::max(0, static_cast<int>(std::floor(b.y)));
        const int x1 = std::min(width_, static_cast<int>(std::ceil(b.x + b.w)));
        const int y1 = std::min(height_, static_cast<int>(std::ceil(b.y + b.h)));
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x) {
                const double px = x + 0.5;
                const double py = y + 0.5;
                if (px < b.x || px >= b.x + b.w || py < b.y || py >= b.y + b.h)
                    continue;
                const double v = lattice(tex, kTextureGrid, (px - b.x) / b.w, (py - b.y) / b.h);
                for (int c = 0; c < channels_; ++c)
                    img.at(x, y, c) = to_byte(c == 0 ? v : 255.0 - v * (0.5 + 0.25 * c));
            }
    }
    return img;
}

SyntheticSequence make_moving_sequence(const std::string& name, const MotionSpec& spec) {
    return single_object(name, spec, [&](int f) {
        return BBox{spec.start.x + f * spec.velocity.x, spec.start.y + f * spec.velocity.y, spec.start.w, spec.start.h};
    });
}

SyntheticSequence make_static_sequence(const std::string& name, const MotionSpec& spec) {
    return single_object(name, spec, [&](int) { return spec.start; });
}

SyntheticSequence make_zoom_sequence(const std::string& name, const MotionSpec& spec, double growth, int period) {
    const Point2 c = spec.start.center();
    return single_object(name, spec, [&](int f) {
        const double s = std::pow(growth, static_cast<double>(f) / period);
        return BBox::from_center(c, spec.start.w * s, spec.start.h * s);
    });
}

SyntheticSequence make_distractor_sequence(const std::string& name, const DistractorSpec& spec) {
    SceneRenderer renderer(spec.width, spec.height, spec.seed, 1);
    SyntheticSequence seq;
    seq.name = name;
    const std::uint32_t texture = spec.seed + 2000u;
    const Point2 start{spec.width / 2.0 - spec.separation / 2.0, spec.height / 2.0};
    for (int f = 0; f < spec.frames; ++f) {
        const Point2 tc{start.x + f * spec.velocity.x, start.y + f * spec.velocity.y};
        const Point2 dc{tc.x + spec.separation + f * spec.distractor_velocity.x,
                        tc.y + f * spec.distractor_velocity.y};
        const BBox target = BBox::from_center(tc, spec.size, spec.size);
        const BBox twin = BBox::from_center(dc, spec.size, spec.size);
        seq.frames.push_back(renderer.render({{target, texture}, {twin, texture}}));
        seq.groundtruth.push_back(target);
        seq.distractors.push_back({twin});
    }
    return seq;
}

std::vector<SyntheticSequence> make_distractor_dataset(int count) {
    std::vector<SyntheticSequence> out;
    for (int i = 0; i < count; ++i) {
        DistractorSpec spec;
        spec.frames = 60;
        spec.seed = 101u + 37u * static_cast<std::uint32_t>(i);
        spec.separation = 36.0 + 4.0 * (i % 3);
        spec.velocity = {0.6 * ((i % 2) ? -1.0 : 1.0), 0.3 * (i % 3)};
        spec.distractor_velocity = {0.0, 0.15 * ((i % 2) ? 1.0 : -1.0)};
        char name[32];
        std::snprintf(name, sizeof name, "twin%02d", i + 1);
        out.push_back(make_distractor_sequence(name, spec));
    }
    return out;
}

void write_sequence(const std::filesystem::path& dir, const SyntheticSequence& seq) {
    std::filesystem::create_directories(dir / "img");
    std::ofstream gt(dir / "groundtruth_rect.txt", std::ios::binary);
    if (!gt)
        throw DataError("cannot write " + (dir / "groundtruth_rect.txt").string());
    char buf[128];
    for (std::size_t f = 0; f < seq.frames.size(); ++f) {
        std::snprintf(buf, sizeof buf, "%04zu.png", f + 1);
        save_image(seq.frames[f], dir / "img" / buf);
        const BBox& b = seq.groundtruth[f];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", b.x, b.y, b.w, b.h);
        gt << buf;
    }
}

}  // namespace drtrack
