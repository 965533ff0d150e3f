#pragma once

#include <vector>

namespace drtrack {

/// Row-major real grid on the cell lattice.
struct Plane {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Plane() = default;
    Plane(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + c]; }
    bool same_shape(const Plane& o) const { return rows == o.rows && cols == o.cols; }

    friend bool operator==(const Plane&, const Plane&) = default;
};

struct Cell {
    int row = 0;
    int col = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Target extent measured in cells; may be fractional.
struct CellExtent {
    double rows = 0.0;
    double cols = 0.0;
};

/// Grid center used by every centered quantity: (floor(rows/2), floor(cols/2)).
inline Cell grid_center(int rows, int cols) { return {rows / 2, cols / 2}; }

/// A detection response, normalized so that its maximum is exactly 1.
using ResponseMap = Plane;

/// Row-major first index of the maximum value.
Cell argmax(const Plane& p);

struct GaussianLabel {
    Plane values;
    double sigma = 0.0;
};

/// g[i,j] = exp(-((i-ci)^2 + (j-cj)^2) / (2 sigma^2)), sigma = sigma_factor * sqrt(target rows * cols).
GaussianLabel gaussian_label(int rows, int cols, CellExtent target, double sigma_factor);

struct LocalMaximum {
    Cell cell;
    double value = 0.0;
};

/// Cells strictly above all 8 cyclic neighbours, by value descending, ties by
/// row-major index ascending. Plateaus produce nothing.
std::vector<LocalMaximum> find_local_maxima(const Plane& r);

/// Target-sized rectangle (extent rounded up) centered on the grid center.
struct CentralMask {
    int top = 0;
    int left = 0;
    int height = 0;
    int width = 0;

    bool contains(Cell c) const { return c.row >= top && c.row < top + height && c.col >= left && c.col < left + width; }
};

CentralMask central_mask(int rows, int cols, CellExtent target);

struct Deviation {
    Cell cell;
    double value = 1.0;
};

/// Per-cell multiplier on the label: 1 everywhere except at repressed distractors.
struct DistractorVector {
    Plane values;
    std::vector<Deviation> deviations;
};

DistractorVector identity_distractor(int rows, int cols);

/// Builds the distractor-repressed vector from a normalized response:
/// shift the peak to the grid center, take local maxima, drop those inside the
/// central target mask, keep the `max_distractors` strongest and set
/// d = 1 - mu * R_shifted there. The shift only relabels coordinates, so the
/// repressed value equals the raw response at the distractor's original cell.
DistractorVector distractor_vector(const ResponseMap& r, Cell peak, CellExtent target, int max_distractors, double mu);

/// Elementwise g * d.
Plane dynamic_target(const GaussianLabel& g, const DistractorVector& d);

/// g + (d - 1) = g - mu * R at the repressed cells. Equal to g for identity d.
Plane additive_target(const GaussianLabel& g, const DistractorVector& d);

}  // namespace drtrack
