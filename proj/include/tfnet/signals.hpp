#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

namespace tfnet {

/// phi(t) = 2*pi*(c1*t + c2*t^2/T + c3*t^3/T^2), coefficients in cycles/sample.
struct CubicLaw {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;

    bool operator==(const CubicLaw&) const = default;
};

/// phi(t) = 2*pi*((fd*T/(2*pi*r)) * cos(2*pi*r*t/T + psi) + fc*t).
/// The instantaneous frequency is fc - fd*sin(2*pi*r*t/T + psi); r counts modulation
/// cycles over the whole record.
struct SinusoidalLaw {
    double fc = 0.0;
    double fd = 0.0;
    double r = 1.0;
    double psi = 0.0;

    bool operator==(const SinusoidalLaw&) const = default;
};

using PhaseLaw = std::variant<CubicLaw, SinusoidalLaw>;

struct ComponentModel {
    double amplitude = 1.0;
    PhaseLaw phase;

    bool operator==(const ComponentModel&) const = default;
};

struct MulticomponentModel {
    std::vector<ComponentModel> components;
    std::size_t length = 0;

    /// Throws std::invalid_argument unless length >= 2, at least one component is present,
    /// and every amplitude is finite and nonnegative.
    void validate() const;

    bool operator==(const MulticomponentModel&) const = default;
};

using ComplexSeries = Eigen::VectorXcd;

inline constexpr double kNoiseFree = std::numeric_limits<double>::infinity();

/// Phase in radians at (possibly fractional) sample index t of a length-T record.
double eval_phase(const PhaseLaw& law, double t, std::size_t length);

/// Analytic derivative of eval_phase divided by 2*pi, in cycles/sample.
double instantaneous_frequency(const PhaseLaw& law, double t, std::size_t length);

ComplexSeries synthesize(const MulticomponentModel& model);

/// Adds circular complex white Gaussian noise of per-sample variance 10^(-snr_db/10)
/// (SNR measured against one unit-amplitude component). Infinite snr_db returns the input.
ComplexSeries add_noise(const ComplexSeries& series, double snr_db, std::uint64_t seed);

}  // namespace tfnet
