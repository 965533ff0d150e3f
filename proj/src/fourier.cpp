#include "drtrack/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include <fftw3.h>

#include "drtrack/error.hpp"

namespace drtrack {

namespace {

// FFTW planning is not thread-safe, execution of an existing plan on new
// arrays is. Plans are created once per (kind, shape) under a lock and never
// destroyed. FFTW_ESTIMATE keeps the chosen algorithm, and therefore the
// rounding, identical from run to run.
enum class PlanKind { kForward2d, kInverse2d, kForwardRows, kInverse1d };

class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(PlanKind kind, int rows, int cols) {
        const auto key = std::make_tuple(kind, rows, cols);
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(key); it != plans_.end())
            return it->second;
        const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
        std::vector<Complex> a(n), b(n);
        auto* in = reinterpret_cast<fftw_complex*>(a.data());
        auto* out = reinterpret_cast<fftw_complex*>(b.data());
        constexpr unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan p = nullptr;
        switch (kind) {
            case PlanKind::kForward2d:
                p = fftw_plan_dft_2d(rows, cols, in, out, FFTW_FORWARD, flags);
                break;
            case PlanKind::kInverse2d:
                p = fftw_plan_dft_2d(rows, cols, in, out, FFTW_BACKWARD, flags);
                break;
            case PlanKind::kForwardRows: {
                int len = cols;
                p = fftw_plan_many_dft(1, &len, rows, in, nullptr, 1, cols, out, nullptr, 1, cols, FFTW_FORWARD, flags);
                break;
            }
            case PlanKind::kInverse1d:
                p = fftw_plan_dft_1d(cols, in, out, FFTW_BACKWARD, flags);
                break;
        }
        if (p == nullptr)
            throw std::runtime_error("FFTW planning failed");
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<PlanKind, int, int>, fftw_plan> plans_;
};

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

Spectrum::Spectrum(int rows, int cols, int channels)
    : rows_(rows), cols_(cols), channels_(channels),
      data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * static_cast<std::size_t>(channels)) {
    if (rows < 0 || cols < 0 || channels < 0)
        throw ShapeError("invalid spectrum shape");
}

void fft2_plane(std::span<const double> in, std::span<Complex> out, int rows, int cols) {
    const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    if (in.size() != n || out.size() != n)
        throw ShapeError("fft2_plane: buffer size mismatch");
    std::vector<Complex> buf(in.begin(), in.end());
    fftw_execute_dft(PlanCache::instance().get(PlanKind::kForward2d, rows, cols), as_fftw(buf.data()),
                     as_fftw(out.data()));
}

void ifft2_plane(std::span<const Complex> in, std::span<double> out, int rows, int cols) {
    const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    if (in.size() != n || out.size() != n)
        throw ShapeError("ifft2_plane: buffer size mismatch");
    std::vector<Complex> src(in.begin(), in.end());
    std::vector<Complex> buf(n);
    fftw_execute_dft(PlanCache::instance().get(PlanKind::kInverse2d, rows, cols), as_fftw(src.data()),
                     as_fftw(buf.data()));
    const double scale = 1.0 / static_cast<double>(n);
#ifndef NDEBUG
    double max_real = 0.0;
    double max_imag = 0.0;
    for (const Complex& v : buf) {
        max_real = std::max(max_real, std::abs(v.real()));
        max_imag = std::max(max_imag, std::abs(v.imag()));
    }
    if (max_imag > 1e-8 * max_real && max_imag * scale > 1e-300)
        throw std::logic_error("ifft2: input spectrum is not conjugate-symmetric");
#endif
    for (std::size_t i = 0; i < n; ++i)
        out[i] = buf[i].real() * scale;
}

Spectrum fft2(const FeatureMap& fm) {
    Spectrum sp(fm.rows(), fm.cols(), fm.channels());
    if (sp.plane_size() == 0)
        return sp;
    for (int ch = 0; ch < fm.channels(); ++ch)
        fft2_plane(fm.channel(ch), sp.channel(ch), fm.rows(), fm.cols());
    return sp;
}

FeatureMap ifft2(const Spectrum& sp, int cell_size) {
    FeatureMap fm(sp.rows(), sp.cols(), sp.channels(), cell_size);
    if (sp.plane_size() == 0)
        return fm;
    for (int ch = 0; ch < sp.channels(); ++ch)
        ifft2_plane(sp.channel(ch), fm.channel(ch), sp.rows(), sp.cols());
    return fm;
}

Spectrum cross_correlate(const Spectrum& a_hat, const Spectrum& b_hat) {
    if (!a_hat.same_shape(b_hat))
        throw ShapeError("cross_correlate: spectra differ in shape");
    Spectrum out(a_hat.rows(), a_hat.cols(), a_hat.channels());
    const auto& a = a_hat.data();
    const auto& b = b_hat.data();
    auto& o = out.data();
    for (std::size_t i = 0; i < o.size(); ++i)
        o[i] = a[i] * std::conj(b[i]);
    return out;
}

std::vector<Complex> fft_rows(std::span<const double> in, int rows, int cols) {
    const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    if (in.size() != n)
        throw ShapeError("fft_rows: buffer size mismatch");
    std::vector<Complex> src(in.begin(), in.end());
    std::vector<Complex> out(n);
    if (n == 0)
        return out;
    fftw_execute_dft(PlanCache::instance().get(PlanKind::kForwardRows, rows, cols), as_fftw(src.data()),
                     as_fftw(out.data()));
    return out;
}

std::vector<double> ifft1(std::span<const Complex> in) {
    const int n = static_cast<int>(in.size());
    std::vector<Complex> src(in.begin(), in.end());
    std::vector<Complex> buf(in.size());
    std::vector<double> out(in.size());
    if (n == 0)
        return out;
    fftw_execute_dft(PlanCache::instance().get(PlanKind::kInverse1d, 1, n), as_fftw(src.data()), as_fftw(buf.data()));
    for (std::size_t i = 0; i < buf.size(); ++i)
        out[i] = buf[i].real() / n;
    return out;
}

std::vector<double> circshift(std::span<const double> in, int rows, int cols, int dr, int dc) {
    std::vector<double> out(in.size());
    const int sr = ((dr % rows) + rows) % rows;
    const int sc = ((dc % cols) + cols) % cols;
    for (int r = 0; r < rows; ++r) {
        const int tr = (r + sr) % rows;
        for (int c = 0; c < cols; ++c)
            out[static_cast<std::size_t>(tr) * cols + (c + sc) % cols] = in[static_cast<std::size_t>(r) * cols + c];
    }
    return out;
}

}  // namespace drtrack
