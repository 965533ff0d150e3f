#include "drtrack/regression.hpp"

#include <algorithm>
#include <cmath>

#include "drtrack/error.hpp"
#include "drtrack/fourier.hpp"

namespace drtrack {

Cell argmax(const Plane& p) {
    if (p.data.empty())
        throw ShapeError("argmax of an empty plane");
    const auto it = std::max_element(p.data.begin(), p.data.end());
    const auto idx = static_cast<int>(it - p.data.begin());
    return {idx / p.cols, idx % p.cols};
}

GaussianLabel gaussian_label(int rows, int cols, CellExtent target, double sigma_factor) {
    if (rows < 3 || cols < 3)
        throw ShapeError("gaussian label needs a grid of at least 3x3 cells");
    const double sigma = sigma_factor * std::sqrt(target.rows * target.cols);
    if (!(sigma > 0.0))
        throw ShapeError("gaussian label sigma must be positive");
    const Cell c = grid_center(rows, cols);
    GaussianLabel g{Plane(rows, cols), sigma};
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (int r = 0; r < rows; ++r) {
        const double dr = r - c.row;
        for (int q = 0; q < cols; ++q) {
            const double dc = q - c.col;
            g.values.at(r, q) = std::exp(-(dr * dr + dc * dc) * inv);
        }
    }
    return g;
}

std::vector<LocalMaximum> find_local_maxima(const Plane& r) {
    std::vector<LocalMaximum> out;
    if (r.rows < 1 || r.cols < 1)
        return out;
    for (int i = 0; i < r.rows; ++i) {
        for (int j = 0; j < r.cols; ++j) {
            const double v = r.at(i, j);
            bool is_max = true;
            for (int di = -1; di <= 1 && is_max; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0)
                        continue;
                    const int ni = (i + di + r.rows) % r.rows;
                    const int nj = (j + dj + r.cols) % r.cols;
                    // On tiny grids a cell can be its own cyclic neighbour.
                    if (ni == i && nj == j)
                        continue;
                    if (!(v > r.at(ni, nj))) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max)
                out.push_back({{i, j}, v});
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const LocalMaximum& a, const LocalMaximum& b) { return a.value > b.value; });
    return out;
}

CentralMask central_mask(int rows, int cols, CellExtent target) {
    const Cell c = grid_center(rows, cols);
    const int h = std::clamp(static_cast<int>(std::ceil(target.rows - 1e-9)), 1, rows);
    const int w = std::clamp(static_cast<int>(std::ceil(target.cols - 1e-9)), 1, cols);
    CentralMask m;
    m.height = h;
    m.width = w;
    m.top = std::clamp(c.row - h / 2, 0, rows - h);
    m.left = std::clamp(c.col - w / 2, 0, cols - w);
    return m;
}

DistractorVector identity_distractor(int rows, int cols) { return {Plane(rows, cols, 1.0), {}}; }

DistractorVector distractor_vector(const ResponseMap& r, Cell peak, CellExtent target, int max_distractors,
                                   double mu) {
    const Cell c = grid_center(r.rows, r.cols);
    Plane shifted(r.rows, r.cols);
    shifted.data = circshift(r.data, r.rows, r.cols, c.row - peak.row, c.col - peak.col);

    const CentralMask mask = central_mask(r.rows, r.cols, target);
    DistractorVector d = identity_distractor(r.rows, r.cols);
    for (const LocalMaximum& m : find_local_maxima(shifted)) {
        if (static_cast<int>(d.deviations.size()) >= max_distractors)
            break;
        // Sorted descending: nothing after a non-positive value can be a distractor.
        if (m.value <= 0.0)
            break;
        if (mask.contains(m.cell))
            continue;
        const double value = 1.0 - mu * m.value;
        d.values.at(m.cell.row, m.cell.col) = value;
        d.deviations.push_back({m.cell, value});
    }
    return d;
}

Plane dynamic_target(const GaussianLabel& g, const DistractorVector& d) {
    if (!g.values.same_shape(d.values))
        throw ShapeError("dynamic_target: label and distractor vector differ in shape");
    Plane out(g.values.rows, g.values.cols);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = g.values.data[i] * d.values.data[i];
    return out;
}

Plane additive_target(const GaussianLabel& g, const DistractorVector& d) {
    if (!g.values.same_shape(d.values))
        throw ShapeError("additive_target: label and distractor vector differ in shape");
    Plane out(g.values.rows, g.values.cols);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = g.values.data[i] + (d.values.data[i] - 1.0);
    return out;
}

}  // namespace drtrack
