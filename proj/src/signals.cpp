#include "tfnet/signals.hpp"

#include "tfnet/rng.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace tfnet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

void MulticomponentModel::validate() const {
    if (length < 2) throw std::invalid_argument("model length must be at least 2");
    if (components.empty()) throw std::invalid_argument("model needs at least one component");
    for (const auto& component : components) {
        if (!std::isfinite(component.amplitude) || component.amplitude < 0.0) {
            throw std::invalid_argument("component amplitude must be finite and nonnegative");
        }
    }
}

double eval_phase(const PhaseLaw& law, double t, std::size_t length) {
    const double T = static_cast<double>(length);
    return std::visit(
        Overloaded{
            [&](const CubicLaw& c) {
                return kTwoPi * (c.c1 * t + c.c2 * t * t / T + c.c3 * t * t * t / (T * T));
            },
            [&](const SinusoidalLaw& s) {
                const double swing = s.fd * T / (kTwoPi * s.r);
                return kTwoPi * (swing * std::cos(kTwoPi * s.r * t / T + s.psi) + s.fc * t);
            },
        },
        law);
}

double instantaneous_frequency(const PhaseLaw& law, double t, std::size_t length) {
    const double T = static_cast<double>(length);
    return std::visit(
        Overloaded{
            [&](const CubicLaw& c) {
                return c.c1 + 2.0 * c.c2 * t / T + 3.0 * c.c3 * t * t / (T * T);
            },
            [&](const SinusoidalLaw& s) {
                return s.fc - s.fd * std::sin(kTwoPi * s.r * t / T + s.psi);
            },
        },
        law);
}

ComplexSeries synthesize(const MulticomponentModel& model) {
    model.validate();
    ComplexSeries samples = ComplexSeries::Zero(static_cast<Eigen::Index>(model.length));
    for (const auto& component : model.components) {
        for (std::size_t t = 0; t < model.length; ++t) {
            const double phase = eval_phase(component.phase, static_cast<double>(t), model.length);
            samples[static_cast<Eigen::Index>(t)] += std::polar(component.amplitude, phase);
        }
    }
    return samples;
}

ComplexSeries add_noise(const ComplexSeries& series, double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db) && snr_db > 0) return series;
    if (std::isnan(snr_db)) throw std::invalid_argument("snr_db is NaN");
    const double part_sigma = std::sqrt(std::pow(10.0, -snr_db / 10.0) / 2.0);
    Rng rng(seed);
    ComplexSeries noisy = series;
    for (Eigen::Index i = 0; i < noisy.size(); ++i) {
        const double re = rng.normal();
        const double im = rng.normal();
        noisy[i] += std::complex<double>(part_sigma * re, part_sigma * im);
    }
    return noisy;
}

}  // namespace tfnet
