#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "drtrack/config.hpp"
#include "drtrack/features.hpp"
#include "drtrack/fourier.hpp"
#include "drtrack/image.hpp"
#include "drtrack/regression.hpp"
#include "drtrack/solver.hpp"

namespace drtrack {

struct ScaleParams {
    int num_scales = 33;
    double step = 1.02;
    double learning_rate = 0.025;
    double sigma_factor = 0.25;
    double lambda = 0.01;
    double model_max_area = 512.0;
};

/// 1-D correlation filter over a scale pyramid of the target: each pyramid
/// level contributes one column of flattened, Hann-weighted HOG features and
/// the filter is learned along the scale axis.
class ScaleFilter {
public:
    ScaleFilter() = default;
    ScaleFilter(const ScaleParams& params, double base_width, double base_height);

    /// Factor applied to the current scale at pyramid level k: step^(k - center).
    double factor(int level) const { return factors_[static_cast<std::size_t>(level)]; }
    int num_scales() const { return params_.num_scales; }
    int center_level() const { return params_.num_scales / 2; }
    bool trained() const { return !den_.empty(); }

    /// One correlation score per pyramid level (length num_scales).
    std::vector<double> scores(const Image& frame, Point2 center, double scale) const;

    /// Blends the pyramid sample at `center` into the running numerator and
    /// denominator (the first call initializes them).
    void update(const Image& frame, Point2 center, double scale);

private:
    /// Features x levels matrix, row-major.
    std::vector<double> sample(const Image& frame, Point2 center, double scale) const;

    ScaleParams params_;
    double base_width_ = 0.0;
    double base_height_ = 0.0;
    Size2 model_size_;
    std::vector<double> factors_;
    std::vector<double> window_;
    std::vector<Complex> label_hat_;
    int feature_rows_ = 0;
    std::vector<Complex> num_;
    std::vector<double> den_;
};

struct Detection {
    Point2 search_center;
    Point2 position;
    /// Centered response: the zero-displacement lag sits at grid_center, max is 1.
    ResponseMap response;
    Cell peak;
    /// Set when the raw response maximum was not positive; position is held.
    bool zero_response = false;
};

/// Per-sequence tracking state. Operations mutate it and must be called in
/// order: init, then per frame detect -> estimate_scale -> update (or step()).
class DrTracker {
public:
    /// Throws DataError for a degenerate box (w or h < 2 px).
    DrTracker(const Image& frame, const BBox& gt, const Config& config, const CnTable* cn_table = nullptr);

    /// Position plus last inter-frame velocity, or the position alone when motion prediction is off.
    Point2 predict_search_center() const;

    /// Correlates the filter with the features at the predicted center.
    Detection detect(const Image& frame) const;

    /// Picks the best pyramid level around `at` (this frame's detected
    /// position), rescales the target and updates the scale filter. Returns
    /// the factor that was applied.
    double estimate_scale(const Image& frame, Point2 at);

    /// Accepts the detection: moves the target, retrains the filter against the
    /// distractor-repressed label and updates the velocity.
    void update(const Image& frame, const Detection& det);

    /// detect + estimate_scale + update; the new box is box() afterwards.
    Detection step(const Image& frame);

    Point2 position() const { return position_; }
    Point2 velocity() const { return velocity_; }
    double scale() const { return scale_; }
    BBox box() const;
    int frame_index() const { return frame_index_; }
    const FilterBank& filters() const { return filters_; }
    const Config& config() const { return config_; }

    int grid_cells() const { return cells_; }
    /// Side of the square search patch in frame pixels at the current scale.
    int search_side_px() const;
    /// Pixel length of one cell in the frame at the current scale.
    double pixels_per_cell() const;
    CellExtent target_cells() const { return target_cells_; }
    const GaussianLabel& label() const { return label_; }
    /// Repression vector used by the most recent update (identity after init).
    const DistractorVector& last_distractors() const { return last_d_; }

    /// Windowed features of the square search patch centered at `center`.
    FeatureMap patch_features(const Image& frame, Point2 center) const;

    /// Maps a label in the centered frame into the solver frame, t[k] = G[c - k].
    Plane to_solver_frame(const Plane& centered) const;

private:
    void train_at(const Image& frame, const DistractorVector& d, double theta);

    Config config_;
    const CnTable* cn_table_ = nullptr;
    FeatureSettings features_;

    Point2 position_;
    Point2 velocity_;
    double base_width_ = 0.0;
    double base_height_ = 0.0;
    double scale_ = 1.0;
    double min_scale_ = 0.0;
    double max_scale_ = 0.0;
    int frame_index_ = 0;

    double base_side_ = 0.0;  // search patch side at scale 1, before rounding to cells
    int template_side_ = 0;   // side after rounding to a whole number of cells
    int cells_ = 0;
    CellExtent target_cells_;
    GaussianLabel label_;
    Plane spatial_weight_;
    std::vector<double> window_;

    FilterBank filters_;
    DistractorVector last_d_;
    ScaleFilter scale_filter_;
};

/// Interface the evaluation harness drives; one instance per sequence.
class SequenceTracker {
public:
    virtual ~SequenceTracker() = default;
    virtual void initialize(const Image& frame, const BBox& gt) = 0;
    struct Output {
        BBox box;
        bool zero_response = false;
    };
    virtual Output track(const Image& frame) = 0;
};

class DrSequenceTracker final : public SequenceTracker {
public:
    explicit DrSequenceTracker(Config config, const CnTable* cn_table = nullptr)
        : config_(std::move(config)), cn_table_(cn_table) {}

    void initialize(const Image& frame, const BBox& gt) override;
    Output track(const Image& frame) override;

private:
    Config config_;
    const CnTable* cn_table_;
    std::optional<DrTracker> tracker_;
};

}  // namespace drtrack
