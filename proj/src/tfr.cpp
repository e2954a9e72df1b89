#include "tfnet/tfr.hpp"

#include "tfnet/fft.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tfnet {

namespace {

Eigen::Index checked_even_length(const ComplexSeries& series) {
    const Eigen::Index length = series.size();
    if (length < 2 || length % 2 != 0) {
        throw std::invalid_argument("time-frequency transforms need an even length >= 2");
    }
    return length;
}

}  // namespace

IafMatrix iaf(const ComplexSeries& series) {
    const Eigen::Index T = checked_even_length(series);
    const Eigen::Index half = T / 2;
    IafMatrix out = IafMatrix::Zero(T, T);
    for (Eigen::Index n = 0; n < T; ++n) {
        // Largest |m| keeping both n+m and n-m inside the record.
        const Eigen::Index reach = std::min({n, T - 1 - n, half - 1});
        for (Eigen::Index m = -reach; m <= reach; ++m) {
            const Eigen::Index column = (m + T) % T;
            out(n, column) = series[n + m] * std::conj(series[n - m]);
        }
    }
    return out;
}

Eigen::MatrixXcd wvd_complex(const ComplexSeries& series) { return fft::forward_rows(iaf(series)); }

TFImage wvd(const ComplexSeries& series) { return checked_real(wvd_complex(series)); }

TFImage checked_real(const Eigen::MatrixXcd& rows) {
    const double max_real = rows.real().cwiseAbs().maxCoeff();
    const double max_imag = rows.imag().cwiseAbs().maxCoeff();
    if (max_imag > kRealnessTolerance * max_real && max_imag > 0.0) {
        std::ostringstream message;
        message << "WVD imaginary residual " << max_imag << " exceeds tolerance against peak " << max_real;
        throw RealnessError(message.str());
    }
    return rows.real();
}

AfMatrix af(const ComplexSeries& series) { return fft::forward_cols(iaf(series)); }

AfMatrix af_from_wvd(const Eigen::MatrixXcd& wvd_rows) {
    return fft::forward_cols(fft::inverse_rows(wvd_rows));
}

TFImage ideal_tfr(const MulticomponentModel& model) {
    model.validate();
    const auto T = static_cast<Eigen::Index>(model.length);
    TFImage label = TFImage::Zero(T, T);
    for (const auto& component : model.components) {
        const double power = component.amplitude * component.amplitude;
        for (Eigen::Index n = 0; n < T; ++n) {
            const double f = instantaneous_frequency(component.phase, static_cast<double>(n), model.length);
            if (!(f >= 0.0 && f < 0.5)) {
                std::ostringstream message;
                message << "instantaneous frequency " << f << " at t=" << n << " is outside [0, 0.5)";
                throw std::domain_error(message.str());
            }
            const auto bin = std::clamp<Eigen::Index>(
                static_cast<Eigen::Index>(std::lround(2.0 * static_cast<double>(T) * f)), 0, T - 1);
            label(n, bin) += power;
        }
    }
    return label;
}

TFImage normalize_input(const TFImage& image) {
    if (image.rows() == 0) return image;
    return image / static_cast<double>(image.rows());
}

}  // namespace tfnet
