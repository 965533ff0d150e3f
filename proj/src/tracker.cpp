#include "drtrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "drtrack/error.hpp"

namespace drtrack {

// ---------------------------------------------------------------------------
// Scale filter

ScaleFilter::ScaleFilter(const ScaleParams& params, double base_width, double base_height)
    : params_(params), base_width_(base_width), base_height_(base_height) {
    const int s = params.num_scales;
    if (s < 1 || s % 2 == 0)
        throw DataError("scale filter needs an odd number of scales");
    const int c = s / 2;
    factors_.resize(static_cast<std::size_t>(s));
    window_.resize(static_cast<std::size_t>(s));
    std::vector<double> label(static_cast<std::size_t>(s));
    const double sigma = std::sqrt(static_cast<double>(s)) * params.sigma_factor;
    for (int k = 0; k < s; ++k) {
        const auto i = static_cast<std::size_t>(k);
        factors_[i] = std::pow(params.step, k - c);
        window_[i] = s == 1 ? 1.0 : 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (k + 1) / (s + 1)));
        label[i] = std::exp(-0.5 * (k - c) * (k - c) / (sigma * sigma));
    }
    label_hat_ = fft_rows(label, 1, s);

    const double area = base_width * base_height;
    const double shrink = area > params.model_max_area ? std::sqrt(params.model_max_area / area) : 1.0;
    constexpr int kCell = 4;
    model_size_.width = std::max(2 * kCell, static_cast<int>(base_width * shrink) / kCell * kCell);
    model_size_.height = std::max(2 * kCell, static_cast<int>(base_height * shrink) / kCell * kCell);
    feature_rows_ = kHogChannels * (model_size_.width / kCell) * (model_size_.height / kCell);
}

std::vector<double> ScaleFilter::sample(const Image& frame, Point2 center, double scale) const {
    const int s = params_.num_scales;
    std::vector<double> out(static_cast<std::size_t>(feature_rows_) * static_cast<std::size_t>(s));
    for (int k = 0; k < s; ++k) {
        const double f = scale * factors_[static_cast<std::size_t>(k)];
        const Image patch = sample_patch(frame, center, std::max(4.0, base_width_ * f), std::max(4.0, base_height_ * f),
                                         model_size_);
        const FeatureMap hog = extract_hog(patch, 4);
        const double wk = window_[static_cast<std::size_t>(k)];
        const auto& d = hog.data();
        for (int r = 0; r < feature_rows_; ++r)
            out[static_cast<std::size_t>(r) * s + k] = d[static_cast<std::size_t>(r)] * wk;
    }
    return out;
}

void ScaleFilter::update(const Image& frame, Point2 center, double scale) {
    const int s = params_.num_scales;
    const auto xs = sample(frame, center, scale);
    const auto xsf = fft_rows(xs, feature_rows_, s);
    std::vector<Complex> num(xsf.size());
    std::vector<double> den(static_cast<std::size_t>(s), 0.0);
    for (int r = 0; r < feature_rows_; ++r) {
        for (int u = 0; u < s; ++u) {
            const auto i = static_cast<std::size_t>(r) * s + u;
            num[i] = label_hat_[static_cast<std::size_t>(u)] * std::conj(xsf[i]);
            den[static_cast<std::size_t>(u)] += std::norm(xsf[i]);
        }
    }
    if (!trained()) {
        num_ = std::move(num);
        den_ = std::move(den);
        return;
    }
    const double lr = params_.learning_rate;
    for (std::size_t i = 0; i < num_.size(); ++i)
        num_[i] = (1.0 - lr) * num_[i] + lr * num[i];
    for (std::size_t i = 0; i < den_.size(); ++i)
        den_[i] = (1.0 - lr) * den_[i] + lr * den[i];
}

std::vector<double> ScaleFilter::scores(const Image& frame, Point2 center, double scale) const {
    const int s = params_.num_scales;
    if (!trained())
        return std::vector<double>(static_cast<std::size_t>(s), 0.0);
    const auto xsf = fft_rows(sample(frame, center, scale), feature_rows_, s);
    std::vector<Complex> resp(static_cast<std::size_t>(s));
    for (int r = 0; r < feature_rows_; ++r)
        for (int u = 0; u < s; ++u) {
            const auto i = static_cast<std::size_t>(r) * s + u;
            resp[static_cast<std::size_t>(u)] += num_[i] * xsf[i];
        }
    for (int u = 0; u < s; ++u)
        resp[static_cast<std::size_t>(u)] /= den_[static_cast<std::size_t>(u)] + params_.lambda;
    return ifft1(resp);
}

// ---------------------------------------------------------------------------
// Translation tracker

DrTracker::DrTracker(const Image& frame, const BBox& gt, const Config& config, const CnTable* cn_table)
    : config_(config), cn_table_(cn_table) {
    config_.validate();
    if (!(gt.w >= 2.0) || !(gt.h >= 2.0) || !std::isfinite(gt.x) || !std::isfinite(gt.y))
        throw DataError("initial box is degenerate (width and height must be at least 2 px)");

    features_.cell_size = config_.cell_size;
    features_.use_gray = config_.use_gray;
    features_.use_hog = config_.use_hog;
    features_.use_cn = config_.use_cn && cn_table_ != nullptr && !cn_table_->empty();
    features_.cn_table = features_.use_cn ? cn_table_ : nullptr;

    position_ = gt.center();
    base_width_ = gt.w;
    base_height_ = gt.h;

    base_side_ = config_.search_factor * std::sqrt(gt.w * gt.h);
    const double crop_side = std::max(1.0, std::round(base_side_));
    template_side_ = round_to_cells(crop_side, config_.cell_size);
    cells_ = template_side_ / config_.cell_size;
    if (cells_ < 3)
        throw DataError("search region is smaller than 3x3 cells; enlarge the box or reduce cell_size");

    const double px_to_cells = template_side_ / crop_side / config_.cell_size;
    target_cells_ = {std::min<double>(gt.h * px_to_cells, cells_), std::min<double>(gt.w * px_to_cells, cells_)};
    label_ = gaussian_label(cells_, cells_, target_cells_, config_.sigma_factor);
    // The h-step shrinks a cell by 1 / (1 + w^2 / (gamma K)); scaling the bowl by
    // sqrt(K) keeps the filter support the same fraction of the target at any grid size.
    const double w_scale = static_cast<double>(cells_);
    spatial_weight_ =
        make_spatial_weight(cells_, cells_, target_cells_, config_.w_min * w_scale, config_.w_amp * w_scale);
    window_ = hann_window(cells_, cells_);

    min_scale_ = std::min(1.0, std::max(5.0 / gt.w, 5.0 / gt.h));
    max_scale_ = std::max(1.0, std::min(frame.width() / gt.w, frame.height() / gt.h));

    scale_filter_ = ScaleFilter({config_.num_scales, config_.scale_step, config_.scale_learning_rate,
                                 config_.scale_sigma_factor, config_.scale_lambda, config_.scale_model_max_area},
                                gt.w, gt.h);
    scale_filter_.update(frame, position_, scale_);

    // The first frame has no response map and no previous filter: plain label, no temporal term.
    train_at(frame, identity_distractor(cells_, cells_), 0.0);
    frame_index_ = 1;
}

int DrTracker::search_side_px() const {
    return std::max(config_.cell_size, static_cast<int>(std::lround(base_side_ * scale_)));
}

double DrTracker::pixels_per_cell() const { return static_cast<double>(search_side_px()) / cells_; }

BBox DrTracker::box() const { return BBox::from_center(position_, base_width_ * scale_, base_height_ * scale_); }

Point2 DrTracker::predict_search_center() const { return config_.no_ma ? position_ : position_ + velocity_; }

FeatureMap DrTracker::patch_features(const Image& frame, Point2 center) const {
    // Sampled at the exact (fractional) center: a rounded crop would let a
    // sub-pixel offset repeat on an unchanged patch and accumulate.
    const int side = search_side_px();
    const Image patch = sample_patch(frame, center, side, side, {template_side_, template_side_});
    FeatureMap fm = extract_features(patch, features_);
    for (int ch = 0; ch < fm.channels(); ++ch) {
        auto plane = fm.channel(ch);
        for (std::size_t i = 0; i < plane.size(); ++i)
            plane[i] *= window_[i];
    }
    return fm;
}

Plane DrTracker::to_solver_frame(const Plane& centered) const {
    const Cell c = grid_center(centered.rows, centered.cols);
    Plane out(centered.rows, centered.cols);
    for (int r = 0; r < centered.rows; ++r) {
        const int sr = ((c.row - r) % centered.rows + centered.rows) % centered.rows;
        for (int q = 0; q < centered.cols; ++q) {
            const int sq = ((c.col - q) % centered.cols + centered.cols) % centered.cols;
            out.at(r, q) = centered.at(sr, sq);
        }
    }
    return out;
}

namespace {

// Maximum of the trigonometric interpolant of a response, by Newton steps
// from an integer peak. `spectrum` is the DFT of the uncentered n x n response
// and (row, col) the peak in that frame; returns the offset in cells, clamped
// to half a cell so a saddle cannot carry the estimate off the peak.
std::pair<double, double> refine_peak(const std::vector<Complex>& spectrum, int n, int row, int col) {
    std::vector<double> freq(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u)
        freq[static_cast<std::size_t>(u)] = 2.0 * std::numbers::pi * (u <= (n - 1) / 2 ? u : u - n) / n;
    std::vector<Complex> ey(static_cast<std::size_t>(n));
    std::vector<Complex> ex(static_cast<std::size_t>(n));
    double y = row;
    double x = col;
    for (int iter = 0; iter < 5; ++iter) {
        for (int u = 0; u < n; ++u) {
            ey[static_cast<std::size_t>(u)] = std::polar(1.0, freq[static_cast<std::size_t>(u)] * y);
            ex[static_cast<std::size_t>(u)] = std::polar(1.0, freq[static_cast<std::size_t>(u)] * x);
        }
        // Gradient and Hessian of sum S e^{i(wy y + wx x)}, real part.
        double gy = 0.0, gx = 0.0, hyy = 0.0, hxx = 0.0, hxy = 0.0;
        for (int u = 0; u < n; ++u) {
            const double wy = freq[static_cast<std::size_t>(u)];
            for (int v = 0; v < n; ++v) {
                const double wx = freq[static_cast<std::size_t>(v)];
                const Complex e = spectrum[static_cast<std::size_t>(u) * n + v] * ey[static_cast<std::size_t>(u)] *
                                  ex[static_cast<std::size_t>(v)];
                gy -= wy * e.imag();
                gx -= wx * e.imag();
                hyy -= wy * wy * e.real();
                hxx -= wx * wx * e.real();
                hxy -= wx * wy * e.real();
            }
        }
        const double det = hyy * hxx - hxy * hxy;
        if (!(hyy < 0.0) || !(det > 0.0))
            break;
        y -= (hxx * gy - hxy * gx) / det;
        x -= (hyy * gx - hxy * gy) / det;
        y = std::clamp(y, row - 0.5, row + 0.5);
        x = std::clamp(x, col - 0.5, col + 0.5);
    }
    return {y - row, x - col};
}

}  // namespace

Detection DrTracker::detect(const Image& frame) const {
    Detection det;
    det.search_center = predict_search_center();
    const FeatureMap s = patch_features(frame, det.search_center);
    const Spectrum s_hat = fft2(s);
    const Spectrum& h_hat = filters_.h_hat;
    if (s_hat.channels() != h_hat.channels())
        throw ShapeError("detect: feature channel count changed since training");

    const std::size_t k = s_hat.plane_size();
    std::vector<Complex> sum(k);
    for (int ch = 0; ch < s_hat.channels(); ++ch) {
        const auto a = s_hat.channel(ch);
        const auto b = h_hat.channel(ch);
        for (std::size_t i = 0; i < k; ++i)
            sum[i] += a[i] * std::conj(b[i]);
    }
    std::vector<double> raw(k);
    ifft2_plane(sum, raw, cells_, cells_);

    const Cell c = grid_center(cells_, cells_);
    det.response = Plane(cells_, cells_);
    det.response.data = circshift(raw, cells_, cells_, c.row, c.col);

    const double peak_value = *std::max_element(det.response.data.begin(), det.response.data.end());
    if (!(peak_value > 0.0) || !std::isfinite(peak_value)) {
        det.zero_response = true;
        det.peak = c;
        det.position = position_;
        return det;
    }
    for (double& v : det.response.data)
        v /= peak_value;
    det.peak = argmax(det.response);

    double dr = det.peak.row - c.row;
    double dc = det.peak.col - c.col;
    if (config_.subpixel) {
        const auto [oy, ox] = refine_peak(sum, cells_, (det.peak.row - c.row + cells_) % cells_,
                                          (det.peak.col - c.col + cells_) % cells_);
        dr += oy;
        dc += ox;
    }
    const double ppc = pixels_per_cell();
    det.position = {det.search_center.x + dc * ppc, det.search_center.y + dr * ppc};
    return det;
}

double DrTracker::estimate_scale(const Image& frame, Point2 at) {
    const auto scores = scale_filter_.scores(frame, at, scale_);
    const auto best = static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
    const double before = scale_;
    scale_ = std::clamp(scale_ * scale_filter_.factor(best), min_scale_, max_scale_);
    scale_filter_.update(frame, at, scale_);
    return scale_ / before;
}

void DrTracker::update(const Image& frame, const Detection& det) {
    DistractorVector d = config_.no_dr || det.zero_response
                             ? identity_distractor(cells_, cells_)
                             : distractor_vector(det.response, det.peak, target_cells_, config_.num_distractors,
                                                 config_.mu);
    const Point2 previous = position_;
    position_ = det.position;
    velocity_ = position_ - previous;
    train_at(frame, d, config_.theta);
    ++frame_index_;
}

Detection DrTracker::step(const Image& frame) {
    Detection det = detect(frame);
    estimate_scale(frame, det.position);
    update(frame, det);
    return det;
}

void DrTracker::train_at(const Image& frame, const DistractorVector& d, double theta) {
    const FeatureMap m = patch_features(frame, position_);
    const Plane target =
        to_solver_frame(config_.repression == "product" ? dynamic_target(label_, d) : additive_target(label_, d));
    AdmmParams params = config_.admm();
    params.theta = theta;
    filters_ = train(m, target, filters_.v_hat, params, spatial_weight_);
    last_d_ = d;
}

// ---------------------------------------------------------------------------

void DrSequenceTracker::initialize(const Image& frame, const BBox& gt) { tracker_.emplace(frame, gt, config_, cn_table_); }

SequenceTracker::Output DrSequenceTracker::track(const Image& frame) {
    if (!tracker_)
        throw Error("track called before initialize");
    const Detection det = tracker_->step(frame);
    return {tracker_->box(), det.zero_response};
}

}  // namespace drtrack
