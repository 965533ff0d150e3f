#pragma once

#include <complex>
#include <span>
#include <vector>

#include "drtrack/features.hpp"

namespace drtrack {

using Complex = std::complex<double>;

/// Per-channel 2-D spectrum, channel-major like FeatureMap.
class Spectrum {
public:
    Spectrum() = default;
    Spectrum(int rows, int cols, int channels);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int channels() const { return channels_; }
    std::size_t plane_size() const { return static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_); }

    Complex& at(int r, int c, int ch) {
        return data_[static_cast<std::size_t>(ch) * plane_size() + static_cast<std::size_t>(r) * cols_ + c];
    }
    Complex at(int r, int c, int ch) const {
        return data_[static_cast<std::size_t>(ch) * plane_size() + static_cast<std::size_t>(r) * cols_ + c];
    }

    std::span<Complex> channel(int ch) { return {data_.data() + static_cast<std::size_t>(ch) * plane_size(), plane_size()}; }
    std::span<const Complex> channel(int ch) const {
        return {data_.data() + static_cast<std::size_t>(ch) * plane_size(), plane_size()};
    }

    std::vector<Complex>& data() { return data_; }
    const std::vector<Complex>& data() const { return data_; }

    bool same_shape(const Spectrum& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && channels_ == o.channels_; }

    friend bool operator==(const Spectrum&, const Spectrum&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    int channels_ = 0;
    std::vector<Complex> data_;
};

/// Unnormalized forward DFT of every channel.
Spectrum fft2(const FeatureMap& fm);

/// Inverse DFT scaled by 1/(rows*cols), real part kept. Debug builds check
/// that the discarded imaginary residue is below 1e-8 * max|real|.
FeatureMap ifft2(const Spectrum& sp, int cell_size = 1);

/// Single-plane transforms on raw row-major buffers.
void fft2_plane(std::span<const double> in, std::span<Complex> out, int rows, int cols);
void ifft2_plane(std::span<const Complex> in, std::span<double> out, int rows, int cols);

/// Spectrum of the cyclic cross-correlation r[k] = sum_n a[n + k] b[n],
/// i.e. a_hat * conj(b_hat) elementwise.
Spectrum cross_correlate(const Spectrum& a_hat, const Spectrum& b_hat);

/// Forward DFT along each row of a rows x cols real matrix (1-D transforms of length cols).
std::vector<Complex> fft_rows(std::span<const double> in, int rows, int cols);

/// Inverse of a single length-n spectrum, real part, scaled by 1/n.
std::vector<double> ifft1(std::span<const Complex> in);

/// Circular shift of a row-major plane: out[(r + dr) mod R, (c + dc) mod C] = in[r, c].
std::vector<double> circshift(std::span<const double> in, int rows, int cols, int dr, int dc);

}  // namespace drtrack
