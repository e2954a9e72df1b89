#pragma once

#include "tfnet/signals.hpp"
#include "tfnet/tfr.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace tfnet {

struct OmpConfig {
    std::size_t sparsity = 2;
    /// Gaussian lag taper scale in samples; unset means T/8, infinity disables the taper.
    std::optional<double> lag_sigma;
};

struct OmpResult {
    /// Selected DFT atom indices in selection order.
    std::vector<Eigen::Index> support;
    /// Least-squares coefficients on the final support, aligned with `support`.
    Eigen::VectorXcd coefficients;
    /// Residual norm before the first selection and after each iteration.
    std::vector<double> residual_norms;
};

/// Orthogonal matching pursuit over the length-T dictionary of atoms exp(j*2*pi*k*l/T).
/// Each iteration adds the atom with the largest |correlation| to the residual and refits all
/// selected coefficients by least squares. A zero input yields an empty support.
OmpResult omp_solve(const Eigen::VectorXcd& row, std::size_t sparsity);

/// Per-time-instant sparse TFR: each IAF row is tapered in lag, solved with omp_solve, and the
/// coefficient magnitudes are written at the selected frequency bins.
TFImage omp_tfr(const ComplexSeries& series, const OmpConfig& config = {});

struct L1ProxConfig {
    /// Rectangle of kept AF samples around the origin: |Doppler| <= 6 and |lag| <= 6 gives 13 x 13.
    std::size_t doppler_half_width = 6;
    std::size_t lag_half_width = 6;
    /// Threshold weight; unset means lambda_fraction * max|adjoint(b)|.
    std::optional<double> lambda;
    double lambda_fraction = 0.01;
    double step = 1.0;
    std::size_t max_iters = 500;
    /// Stop once the relative objective change drops below this; 0 runs all iterations.
    double tolerance = 1e-6;
};

struct L1ProxResult {
    TFImage image;
    /// Objective after each iteration.
    std::vector<double> objective;
    double lambda = 0.0;
};

double soft_threshold(double x, double threshold);

/// Unitary 2-D transform taking a (complex) WVD image to the ambiguity function: inverse DFT
/// over frequency, forward DFT over time. Identical to af_from_wvd.
Eigen::MatrixXcd tf_to_af(const Eigen::MatrixXcd& image);
/// Adjoint (and inverse) of tf_to_af.
Eigen::MatrixXcd af_to_tf(const Eigen::MatrixXcd& ambiguity);

/// 0/1 mask over wrapped (Doppler, lag) indices of a T x T ambiguity function.
Eigen::MatrixXd af_mask(std::size_t length, std::size_t doppler_half_width, std::size_t lag_half_width);

/// ISTA for min_Y 0.5 * ||mask .* tf_to_af(Y) - b||^2 + lambda * ||Y||_1 over real Y, where b is
/// the masked AF of the series. Starts from Y = 0.
L1ProxResult l1prox_solve(const ComplexSeries& series, const L1ProxConfig& config = {});

TFImage l1prox_tfr(const ComplexSeries& series, const L1ProxConfig& config = {});

}  // namespace tfnet
