#pragma once

#include "tfnet/signals.hpp"

#include <Eigen/Dense>

#include <stdexcept>

namespace tfnet {

/// T x T real image. Row n is time sample n; column k is frequency k/(2T) cycles/sample.
using TFImage = Eigen::MatrixXd;

/// T x T instantaneous autocorrelation. Row n is time; column l = m mod T holds signed lag m.
using IafMatrix = Eigen::MatrixXcd;

/// T x T ambiguity function. Row is the wrapped Doppler index; column is the wrapped lag index.
using AfMatrix = Eigen::MatrixXcd;

/// Raised when a WVD carries an imaginary part large enough to indicate broken lag symmetry.
class RealnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kRealnessTolerance = 1e-6;

/// R(n, m mod T) = s[n+m] * conj(s[n-m]) for -T/2 < m < T/2 with both indices in range;
/// zero otherwise, and the unpaired lag m = -T/2 is always zero. Requires even T.
IafMatrix iaf(const ComplexSeries& series);

/// Lag DFT of every IAF row before taking the real part.
Eigen::MatrixXcd wvd_complex(const ComplexSeries& series);

/// Real part of a transform that should be real; throws RealnessError if
/// max|imag| / max|real| > 1e-6.
TFImage checked_real(const Eigen::MatrixXcd& values);

/// Real part of wvd_complex; throws RealnessError if max|imag| / max|real| > 1e-6.
TFImage wvd(const ComplexSeries& series);

/// Time DFT of every IAF column.
AfMatrix af(const ComplexSeries& series);

/// Recovers the ambiguity function from complex WVD rows: inverse DFT over frequency then
/// forward DFT over time. Equals af() of the same series.
AfMatrix af_from_wvd(const Eigen::MatrixXcd& wvd_rows);

/// Crossterm-free label: a_p^2 at the nearest frequency bin of each component's IF,
/// one pixel per component per time row. Throws std::domain_error if any IF leaves [0, 0.5).
TFImage ideal_tfr(const MulticomponentModel& model);

/// Scales an image by 1/T (T = row count); used identically for training and inference.
TFImage normalize_input(const TFImage& image);

}  // namespace tfnet
