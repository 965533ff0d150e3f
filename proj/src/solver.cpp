#include "drtrack/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drtrack/error.hpp"

namespace drtrack {

void AdmmParams::validate() const {
    if (!(theta >= 0.0) || !std::isfinite(theta))
        throw DataError("theta must be a finite value >= 0");
    if (!(gamma0 > 0.0) || !(gamma_max > 0.0) || !std::isfinite(gamma_max))
        throw DataError("gamma0 and gamma_max must be positive");
    if (!(beta > 1.0))
        throw DataError("beta must be > 1");
    if (iterations < 1)
        throw DataError("ADMM iteration count must be >= 1");
}

Plane make_spatial_weight(int rows, int cols, CellExtent target, double w_min, double w_amp) {
    if (target.rows <= 0.0 || target.cols <= 0.0 || target.rows > rows || target.cols > cols)
        throw ShapeError("spatial weight: target extent must fit inside the grid");
    const Cell c = grid_center(rows, cols);
    const double half_r = target.rows / 2.0;
    const double half_c = target.cols / 2.0;
    Plane w(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const double dr = (r - c.row) / half_r;
        for (int q = 0; q < cols; ++q) {
            const double dc = (q - c.col) / half_c;
            w.at(r, q) = w_min + w_amp * (dr * dr + dc * dc);
        }
    }
    return w;
}

namespace {

void require_same(const Spectrum& a, const Spectrum& b, const char* what) {
    if (!a.same_shape(b))
        throw ShapeError(std::string("solve_v: ") + what + " has a different shape");
}

bool all_finite(const Spectrum& s) {
    for (const Complex& v : s.data())
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            return false;
    return true;
}

}  // namespace

Spectrum solve_v(const Spectrum& m_hat, const Spectrum& target_hat, const Spectrum& v_prev_hat, const Spectrum& h_hat,
                 const Spectrum& z_hat, double theta, double gamma) {
    require_same(m_hat, h_hat, "h_hat");
    require_same(m_hat, z_hat, "z_hat");
    const bool has_prev = theta != 0.0;
    if (has_prev)
        require_same(m_hat, v_prev_hat, "v_prev_hat");
    if (target_hat.rows() != m_hat.rows() || target_hat.cols() != m_hat.cols() || target_hat.channels() != 1)
        throw ShapeError("solve_v: target must be a single-channel spectrum on the same grid");
    if (!(gamma > 0.0) || !(theta >= 0.0))
        throw DataError("solve_v: gamma must be > 0 and theta >= 0");
    if (!all_finite(m_hat) || !all_finite(target_hat) || !all_finite(h_hat) || !all_finite(z_hat) ||
        (has_prev && !all_finite(v_prev_hat)))
        throw NumericError("solve_v: non-finite input");

    const int channels = m_hat.channels();
    const std::size_t k = m_hat.plane_size();
    const double tg = theta + gamma;
    const double inv_tg = 1.0 / tg;
    Spectrum out(m_hat.rows(), m_hat.cols(), channels);
    const Complex* m = m_hat.data().data();
    const Complex* t = target_hat.data().data();
    const Complex* vp = has_prev ? v_prev_hat.data().data() : nullptr;
    const Complex* h = h_hat.data().data();
    const Complex* z = z_hat.data().data();
    Complex* v = out.data().data();

    std::vector<Complex> rhs(static_cast<std::size_t>(channels));
    for (std::size_t j = 0; j < k; ++j) {
        // rhs = m_j * t_j + theta * vp_j + gamma * (h_j - z_j)
        double mm = 0.0;
        Complex mhr(0.0, 0.0);
        for (int c = 0; c < channels; ++c) {
            const std::size_t i = static_cast<std::size_t>(c) * k + j;
            Complex b = m[i] * t[j] + gamma * (h[i] - z[i]);
            if (has_prev)
                b += theta * vp[i];
            rhs[static_cast<std::size_t>(c)] = b;
            mm += std::norm(m[i]);
            mhr += std::conj(m[i]) * b;
        }
        // (m m^H + tg I)^-1 rhs = (rhs - m (m^H rhs) / (tg + m^H m)) / tg
        const Complex coef = mhr / (tg + mm);
        for (int c = 0; c < channels; ++c) {
            const std::size_t i = static_cast<std::size_t>(c) * k + j;
            v[i] = (rhs[static_cast<std::size_t>(c)] - m[i] * coef) * inv_tg;
        }
    }
    return out;
}

FeatureMap solve_h(const FeatureMap& v, const FeatureMap& z, const Plane& w, double gamma) {
    if (!v.same_grid(z) || v.channels() != z.channels() || w.rows != v.rows() || w.cols != v.cols())
        throw ShapeError("solve_h: shape mismatch");
    const double gk = gamma * static_cast<double>(v.plane_size());
    FeatureMap h(v.rows(), v.cols(), v.channels(), v.cell_size());
    std::vector<double> scale(w.data.size());
    for (std::size_t i = 0; i < scale.size(); ++i)
        scale[i] = gk / (w.data[i] * w.data[i] + gk);
    for (int c = 0; c < v.channels(); ++c) {
        const auto vc = v.channel(c);
        const auto zc = z.channel(c);
        auto hc = h.channel(c);
        for (std::size_t i = 0; i < hc.size(); ++i)
            hc[i] = scale[i] * (vc[i] + zc[i]);
    }
    return h;
}

FeatureMap update_multiplier(const FeatureMap& u, const FeatureMap& v, const FeatureMap& h, double gamma) {
    if (!u.same_grid(v) || !u.same_grid(h) || u.channels() != v.channels() || u.channels() != h.channels())
        throw ShapeError("update_multiplier: shape mismatch");
    FeatureMap out = u;
    auto& o = out.data();
    for (std::size_t i = 0; i < o.size(); ++i)
        o[i] += gamma * (v.data()[i] - h.data()[i]);
    return out;
}

double update_step(double gamma, double beta, double gamma_max) { return std::min(gamma_max, beta * gamma); }

FilterBank train(const FeatureMap& m, const Plane& target, const Spectrum& v_last_hat, const AdmmParams& params,
                 const Plane& w, std::vector<double>* consensus) {
    if (target.rows != m.rows() || target.cols != m.cols())
        throw ShapeError("train: target and sample grids differ");
    FeatureMap t(target.rows, target.cols, 1);
    t.data() = target.data;
    return train(fft2(m), fft2(t), v_last_hat, params, w, m.cell_size(), consensus);
}

FilterBank train(const Spectrum& m_hat, const Spectrum& target_hat, const Spectrum& v_last_hat,
                 const AdmmParams& params, const Plane& w, int cell_size, std::vector<double>* consensus) {
    params.validate();
    const int rows = m_hat.rows();
    const int cols = m_hat.cols();
    const int channels = m_hat.channels();
    if (w.rows != rows || w.cols != cols)
        throw ShapeError("train: spatial weight grid differs from the sample grid");

    // The multiplier is tracked unscaled (u); z = u / gamma is formed where the
    // subproblems need it, so growing gamma rescales z by gamma_old / gamma_new.
    FeatureMap h(rows, cols, channels, cell_size);
    Spectrum h_hat(rows, cols, channels);
    FeatureMap u(rows, cols, channels, cell_size);
    Spectrum u_hat(rows, cols, channels);
    FeatureMap v;
    Spectrum v_hat;
    double gamma = params.gamma0;

    for (int e = 0; e < params.iterations; ++e) {
        Spectrum z_hat(rows, cols, channels);
        for (std::size_t i = 0; i < z_hat.data().size(); ++i)
            z_hat.data()[i] = u_hat.data()[i] / gamma;
        v_hat = solve_v(m_hat, target_hat, v_last_hat, h_hat, z_hat, params.theta, gamma);
        v = ifft2(v_hat, cell_size);

        FeatureMap z = u;
        for (double& x : z.data())
            x /= gamma;
        h = solve_h(v, z, w, gamma);
        h_hat = fft2(h);
        if (consensus != nullptr) {
            double r = 0.0;
            for (std::size_t i = 0; i < h.data().size(); ++i)
                r = std::max(r, std::abs(v.data()[i] - h.data()[i]));
            consensus->push_back(r);
        }

        u = update_multiplier(u, v, h, gamma);
        for (std::size_t i = 0; i < u_hat.data().size(); ++i)
            u_hat.data()[i] += gamma * (v_hat.data()[i] - h_hat.data()[i]);
        gamma = update_step(gamma, params.beta, params.gamma_max);
    }

    for (double x : h.data())
        if (!std::isfinite(x))
            throw NumericError("train: filter became non-finite");

    FeatureMap z = u;
    for (double& x : z.data())
        x /= gamma;
    return {std::move(h), std::move(h_hat), std::move(v), std::move(v_hat), std::move(z)};
}

double objective(const Spectrum& m_hat, const Spectrum& target_hat, const FeatureMap& h, const Spectrum& h_last_hat,
                 double theta, const Plane& w) {
    const Spectrum h_hat = fft2(h);
    if (!h_hat.same_shape(m_hat))
        throw ShapeError("objective: filter and sample differ in shape");
    const std::size_t k = m_hat.plane_size();
    double fidelity = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        Complex y(0.0, 0.0);
        for (int c = 0; c < m_hat.channels(); ++c) {
            const std::size_t i = static_cast<std::size_t>(c) * k + j;
            y += std::conj(m_hat.data()[i]) * h_hat.data()[i];
        }
        fidelity += std::norm(target_hat.data()[j] - y);
    }
    double temporal = 0.0;
    if (theta != 0.0) {
        for (std::size_t i = 0; i < h_hat.data().size(); ++i)
            temporal += std::norm(h_hat.data()[i] - h_last_hat.data()[i]);
    }
    double spatial = 0.0;
    for (int c = 0; c < h.channels(); ++c) {
        const auto hc = h.channel(c);
        for (std::size_t i = 0; i < hc.size(); ++i)
            spatial += w.data[i] * w.data[i] * hc[i] * hc[i];
    }
    return 0.5 * fidelity + 0.5 * theta * temporal + 0.5 * spatial;
}

}  // namespace drtrack
