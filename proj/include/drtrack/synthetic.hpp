#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "drtrack/image.hpp"

namespace drtrack {

/// Procedurally rendered test sequences with exact groundtruth. Everything is
/// a pure function of the parameters and seeds.

struct SyntheticObject {
    BBox box;
    /// Objects sharing a texture seed render identically (up to scale).
    std::uint32_t texture_seed = 1;
};

/// Static noise background with textured rectangular objects composited on top.
class SceneRenderer {
public:
    SceneRenderer(int width, int height, std::uint32_t background_seed, int channels = 1);

    Image render(const std::vector<SyntheticObject>& objects) const;

    int width() const { return width_; }
    int height() const { return height_; }

private:
    int width_;
    int height_;
    int channels_;
    Image background_;
};

struct SyntheticSequence {
    std::string name;
    std::vector<Image> frames;
    std::vector<BBox> groundtruth;
    /// Boxes of every other object, per frame (empty when there is none).
    std::vector<std::vector<BBox>> distractors;
};

struct MotionSpec {
    int width = 320;
    int height = 240;
    int frames = 60;
    BBox start{140.0, 100.0, 32.0, 32.0};
    Point2 velocity{1.5, 0.75};
    std::uint32_t seed = 7;
    int channels = 1;
};

/// One textured object moving at constant velocity.
SyntheticSequence make_moving_sequence(const std::string& name, const MotionSpec& spec);

/// The object never moves.
SyntheticSequence make_static_sequence(const std::string& name, const MotionSpec& spec);

/// The object grows by `growth` every `period` frames (smoothly, about its center).
SyntheticSequence make_zoom_sequence(const std::string& name, const MotionSpec& spec, double growth = 1.1,
                                     int period = 10);

struct DistractorSpec {
    int width = 320;
    int height = 240;
    int frames = 30;
    double size = 24.0;
    /// Horizontal center-to-center gap between the target and its identical twin.
    double separation = 40.0;
    /// Shared drift of both objects per frame.
    Point2 velocity{0.5, 0.25};
    /// Extra motion of the twin relative to the target per frame.
    Point2 distractor_velocity{0.0, 0.0};
    std::uint32_t seed = 11;
};

/// Target plus an identical distractor `separation` px to its right.
SyntheticSequence make_distractor_sequence(const std::string& name, const DistractorSpec& spec);

/// A handful of distractor sequences with varied seeds, gaps and motion.
std::vector<SyntheticSequence> make_distractor_dataset(int count = 4);

/// `<dir>/img/0001.png...` and `<dir>/groundtruth_rect.txt`.
void write_sequence(const std::filesystem::path& dir, const SyntheticSequence& seq);

}  // namespace drtrack
