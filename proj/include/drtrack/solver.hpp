#pragma once

#include <vector>

#include "drtrack/features.hpp"
#include "drtrack/fourier.hpp"
#include "drtrack/regression.hpp"

namespace drtrack {

struct AdmmParams {
    double theta = 12.0;      ///< temporal regularization weight
    double gamma0 = 1.0;      ///< initial penalty (step) parameter
    double gamma_max = 10000.0;
    double beta = 10.0;       ///< penalty growth factor per iteration
    int iterations = 4;

    /// Throws DataError when any field is out of range.
    void validate() const;
};

/// Spatial regularization weight: a quadratic bowl centered on the grid,
/// w = w_min + w_amp * ((di / (target_rows/2))^2 + (dj / (target_cols/2))^2).
Plane make_spatial_weight(int rows, int cols, CellExtent target, double w_min = 1e-3, double w_amp = 0.1);

/// Trained filters. `h` is the spatially regularized filter used for
/// detection, `v` its unconstrained ADMM copy that is carried to the next
/// frame as the temporal anchor.
struct FilterBank {
    FeatureMap h;
    Spectrum h_hat;
    FeatureMap v;
    Spectrum v_hat;
    /// Scaled multiplier z = u / gamma at the final penalty value.
    FeatureMap z;
};

/// Per-pixel closed-form v update (Sherman-Morrison). The data term is
/// sum_c conj(m_hat_c) * v_hat_c ~ target_hat, so inner products over
/// channels are conjugate-transposed. `target_hat` has one channel.
Spectrum solve_v(const Spectrum& m_hat, const Spectrum& target_hat, const Spectrum& v_prev_hat, const Spectrum& h_hat,
                 const Spectrum& z_hat, double theta, double gamma);

/// h_c = gamma*K*(v_c + z_c) / (w*w + gamma*K), elementwise in the spatial domain.
FeatureMap solve_h(const FeatureMap& v, const FeatureMap& z, const Plane& w, double gamma);

/// Lagrange multiplier step u' = u + gamma * (v - h) on the unscaled multiplier.
FeatureMap update_multiplier(const FeatureMap& u, const FeatureMap& v, const FeatureMap& h, double gamma);

/// min(gamma_max, beta * gamma)
double update_step(double gamma, double beta, double gamma_max);

/// Runs `params.iterations` ADMM rounds from h = z = 0. `target` lives in the
/// solver frame (see tracker), `v_last_hat` may be empty when theta == 0.
/// When `consensus` is given, max|v - h| is appended after every round.
FilterBank train(const FeatureMap& m, const Plane& target, const Spectrum& v_last_hat, const AdmmParams& params,
                 const Plane& w, std::vector<double>* consensus = nullptr);

/// Same as above with the sample and target already transformed.
FilterBank train(const Spectrum& m_hat, const Spectrum& target_hat, const Spectrum& v_last_hat,
                 const AdmmParams& params, const Plane& w, int cell_size = 1,
                 std::vector<double>* consensus = nullptr);

/// The minimized objective as the ADMM steps define it:
///   1/2 |t_hat - sum_c conj(m_hat_c) h_hat_c|^2 + theta/2 sum_c |h_hat_c - l_hat_c|^2 + 1/2 sum_c |w * h_c|^2
/// with unnormalized DFTs, i.e. the fidelity and temporal terms carry the
/// factor K relative to their spatial-domain forms.
double objective(const Spectrum& m_hat, const Spectrum& target_hat, const FeatureMap& h, const Spectrum& h_last_hat,
                 double theta, const Plane& w);

}  // namespace drtrack
