#include "tfnet/baselines.hpp"

#include "tfnet/fft.hpp"
#include "tfnet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace tfnet {

namespace {

Eigen::Index signed_index(Eigen::Index wrapped, Eigen::Index length) {
    return wrapped < length / 2 ? wrapped : wrapped - length;
}

Eigen::VectorXcd dft_atom(Eigen::Index k, Eigen::Index length) {
    Eigen::VectorXcd atom(length);
    for (Eigen::Index l = 0; l < length; ++l) {
        // Reduce k*l mod T first so the angle stays small and exact.
        const double turns = static_cast<double>((k * l) % length) / static_cast<double>(length);
        atom[l] = std::polar(1.0, 2.0 * std::numbers::pi * turns);
    }
    return atom;
}

double objective_value(const Eigen::MatrixXcd& masked_residual, const TFImage& image, double lambda) {
    return 0.5 * masked_residual.squaredNorm() + lambda * image.cwiseAbs().sum();
}

}  // namespace

OmpResult omp_solve(const Eigen::VectorXcd& row, std::size_t sparsity) {
    const Eigen::Index length = row.size();
    OmpResult result;
    result.coefficients.resize(0);
    Eigen::VectorXcd residual = row;
    result.residual_norms.push_back(residual.norm());
    if (result.residual_norms.back() == 0.0) return result;

    Eigen::MatrixXcd selected(length, 0);
    const std::size_t limit = std::min<std::size_t>(sparsity, static_cast<std::size_t>(length));
    for (std::size_t iter = 0; iter < limit; ++iter) {
        // Correlation with atom k is sum_l conj(atom_k[l]) * residual[l], the forward DFT.
        const Eigen::VectorXcd correlation = fft::forward(residual);
        Eigen::Index best = -1;
        double best_magnitude = -1.0;
        for (Eigen::Index k = 0; k < length; ++k) {
            if (std::find(result.support.begin(), result.support.end(), k) != result.support.end()) continue;
            const double magnitude = std::abs(correlation[k]);
            if (magnitude > best_magnitude) {
                best_magnitude = magnitude;
                best = k;
            }
        }
        result.support.push_back(best);
        selected.conservativeResize(Eigen::NoChange, selected.cols() + 1);
        selected.col(selected.cols() - 1) = dft_atom(best, length);
        result.coefficients = selected.colPivHouseholderQr().solve(row);
        residual = row - selected * result.coefficients;
        result.residual_norms.push_back(residual.norm());
        if (result.residual_norms.back() == 0.0) break;
    }
    return result;
}

TFImage omp_tfr(const ComplexSeries& series, const OmpConfig& config) {
    const IafMatrix autocorrelation = iaf(series);
    const Eigen::Index T = autocorrelation.rows();
    const double sigma = config.lag_sigma.value_or(static_cast<double>(T) / 8.0);
    Eigen::VectorXd taper(T);
    for (Eigen::Index l = 0; l < T; ++l) {
        const double m = static_cast<double>(signed_index(l, T));
        taper[l] = std::isinf(sigma) ? 1.0 : std::exp(-m * m / (2.0 * sigma * sigma));
    }
    TFImage image = TFImage::Zero(T, T);
    parallel_for(static_cast<std::size_t>(T), [&](std::size_t n) {
        const auto row_index = static_cast<Eigen::Index>(n);
        const Eigen::VectorXcd row = autocorrelation.row(row_index).transpose().cwiseProduct(taper.cast<std::complex<double>>());
        const OmpResult solved = omp_solve(row, config.sparsity);
        for (std::size_t i = 0; i < solved.support.size(); ++i) {
            image(row_index, solved.support[i]) = std::abs(solved.coefficients[static_cast<Eigen::Index>(i)]);
        }
    });
    return image;
}

double soft_threshold(double x, double threshold) {
    const double shrunk = std::abs(x) - threshold;
    if (shrunk <= 0.0) return 0.0;
    return std::copysign(shrunk, x);
}

Eigen::MatrixXcd tf_to_af(const Eigen::MatrixXcd& image) { return fft::forward_cols(fft::inverse_rows(image)); }

Eigen::MatrixXcd af_to_tf(const Eigen::MatrixXcd& ambiguity) {
    return fft::forward_rows(fft::inverse_cols(ambiguity));
}

Eigen::MatrixXd af_mask(std::size_t length, std::size_t doppler_half_width, std::size_t lag_half_width) {
    const auto T = static_cast<Eigen::Index>(length);
    Eigen::MatrixXd mask = Eigen::MatrixXd::Zero(T, T);
    for (Eigen::Index d = 0; d < T; ++d) {
        if (std::abs(signed_index(d, T)) > static_cast<Eigen::Index>(doppler_half_width)) continue;
        for (Eigen::Index l = 0; l < T; ++l) {
            if (std::abs(signed_index(l, T)) <= static_cast<Eigen::Index>(lag_half_width)) mask(d, l) = 1.0;
        }
    }
    return mask;
}

L1ProxResult l1prox_solve(const ComplexSeries& series, const L1ProxConfig& config) {
    const AfMatrix full = af(series);
    const Eigen::Index T = full.rows();
    const Eigen::MatrixXd mask = af_mask(static_cast<std::size_t>(T), config.doppler_half_width, config.lag_half_width);
    const Eigen::MatrixXcd measured = full.cwiseProduct(mask.cast<std::complex<double>>());

    L1ProxResult result;
    const TFImage backprojection = af_to_tf(measured).real();
    result.lambda = config.lambda.value_or(config.lambda_fraction * backprojection.cwiseAbs().maxCoeff());
    const double threshold = config.step * result.lambda;

    TFImage image = TFImage::Zero(T, T);
    Eigen::MatrixXcd masked_residual = -measured;
    double previous = objective_value(masked_residual, image, result.lambda);
    for (std::size_t iter = 0; iter < config.max_iters; ++iter) {
        const TFImage gradient = af_to_tf(masked_residual).real();
        const TFImage moved = image - config.step * gradient;
        image = moved.unaryExpr([threshold](double v) { return soft_threshold(v, threshold); });
        masked_residual = tf_to_af(image.cast<std::complex<double>>()).cwiseProduct(mask.cast<std::complex<double>>()) -
                          measured;
        const double current = objective_value(masked_residual, image, result.lambda);
        result.objective.push_back(current);
        const double change = std::abs(previous - current) / std::max(std::abs(previous), 1e-300);
        previous = current;
        if (config.tolerance > 0.0 && change < config.tolerance) break;
    }
    result.image = std::move(image);
    return result;
}

TFImage l1prox_tfr(const ComplexSeries& series, const L1ProxConfig& config) {
    return l1prox_solve(series, config).image;
}

}  // namespace tfnet
