#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tfnet/rng.hpp"
#include "tfnet/signals.hpp"

#include <cmath>
#include <numbers>

using namespace tfnet;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t T = 128;

const CubicLaw kCase1First{0.06, 0.25, -0.15};
const SinusoidalLaw kCase3Sfm{0.22, 0.12, 1.0, kPi};

// Phase of the sinusoidal component exactly as printed for case 3.
double case3_sfm_phase(double t) {
    const double Td = static_cast<double>(T);
    return 2.0 * kPi * ((0.06 * Td / kPi) * std::cos(2.0 * kPi * t / Td + kPi) + 0.22 * t);
}

PhaseLaw random_law(Rng& rng) {
    if (rng.uniform() < 0.5) {
        return CubicLaw{rng.uniform(0.05, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2)};
    }
    return SinusoidalLaw{rng.uniform(0.15, 0.35), rng.uniform(0.05, 0.15), rng.uniform(0.5, 2.0),
                         rng.uniform(0.0, 2.0 * kPi)};
}

}  // namespace

TEST_CASE("cubic phase law values") {
    CHECK(eval_phase(kCase1First, 0.0, T) == 0.0);
    CHECK(eval_phase(kCase1First, static_cast<double>(T), T) ==
          doctest::Approx(2.0 * kPi * 0.16 * static_cast<double>(T)).epsilon(1e-12));
}

TEST_CASE("sinusoidal parameterization reproduces the case 3 SFM phase") {
    CHECK(eval_phase(kCase3Sfm, 0.0, T) == doctest::Approx(-0.12 * static_cast<double>(T)).epsilon(1e-12));
    for (double t = 0.0; t < static_cast<double>(T); t += 7.0) {
        CHECK(eval_phase(kCase3Sfm, t, T) == doctest::Approx(case3_sfm_phase(t)).epsilon(1e-12));
    }
}

TEST_CASE("instantaneous frequency examples") {
    CHECK(instantaneous_frequency(kCase1First, 0.0, T) == doctest::Approx(0.06));
    for (double t : {0.0, 17.0, 127.0}) CHECK(instantaneous_frequency(CubicLaw{0.25, 0.0, 0.0}, t, T) == 0.25);
    CHECK(instantaneous_frequency(kCase3Sfm, 0.0, T) == doctest::Approx(0.22).epsilon(1e-15));
    // Case 3 SFM IF is 0.22 + 0.12 sin(2 pi t / T): a quarter record in it peaks at 0.34.
    CHECK(instantaneous_frequency(kCase3Sfm, 32.0, T) == doctest::Approx(0.34).epsilon(1e-12));
}

TEST_CASE("finite-difference phase derivative matches the analytic IF") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const PhaseLaw law = random_law(rng);
        for (double t = 1.0; t < static_cast<double>(T) - 1.0; t += 9.0) {
            const double numeric = (eval_phase(law, t + 1.0, T) - eval_phase(law, t - 1.0, T)) / (4.0 * kPi);
            CHECK(std::abs(numeric - instantaneous_frequency(law, t, T)) < 1e-3);
        }
    }
}

TEST_CASE("synthesize") {
    SUBCASE("zero amplitudes give a zero series") {
        MulticomponentModel model{{{0.0, CubicLaw{0.1, 0, 0}}, {0.0, kCase3Sfm}}, T};
        CHECK(synthesize(model).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("a unit tone has unit modulus") {
        const auto s = synthesize(MulticomponentModel{{{1.0, CubicLaw{0.13, 0, 0}}}, T});
        for (Eigen::Index t = 0; t < s.size(); ++t) CHECK(std::abs(s[t]) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("two tones: mean power from direct summation") {
        // 0.2 * 128 = 25.6 cross-term cycles, so the cross term leaves 2 + 1/128 (numpy oracle).
        const auto s = synthesize(MulticomponentModel{{{1.0, CubicLaw{0.1, 0, 0}}, {1.0, CubicLaw{0.3, 0, 0}}}, T});
        CHECK(s.squaredNorm() / static_cast<double>(T) == doctest::Approx(2.0078125).epsilon(1e-12));
    }
    SUBCASE("linear in components") {
        Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            MulticomponentModel a{{{rng.uniform(0.0, 2.0), random_law(rng)}}, T};
            MulticomponentModel b{{{rng.uniform(0.0, 2.0), random_law(rng)}, {1.0, random_law(rng)}}, T};
            MulticomponentModel both = a;
            both.components.insert(both.components.end(), b.components.begin(), b.components.end());
            CHECK((synthesize(both) - synthesize(a) - synthesize(b)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SUBCASE("invalid models are rejected") {
        CHECK_THROWS_AS(synthesize(MulticomponentModel{{}, T}), std::invalid_argument);
        CHECK_THROWS_AS(synthesize(MulticomponentModel{{{1.0, kCase3Sfm}}, 1}), std::invalid_argument);
        CHECK_THROWS_AS(synthesize(MulticomponentModel{{{-1.0, kCase3Sfm}}, T}), std::invalid_argument);
    }
}

TEST_CASE("add_noise") {
    const auto clean = synthesize(MulticomponentModel{{{1.0, kCase1First}}, T});
    SUBCASE("infinite SNR is the identity") { CHECK(add_noise(clean, kNoiseFree, 3) == clean); }
    SUBCASE("same seed is bit-identical") { CHECK(add_noise(clean, 5.0, 42) == add_noise(clean, 5.0, 42)); }
    SUBCASE("0 dB noise has unit per-sample variance") {
        const ComplexSeries zeros = ComplexSeries::Zero(T);
        double power = 0.0;
        for (std::uint64_t seed = 0; seed < 1000; ++seed) power += add_noise(zeros, 0.0, seed).squaredNorm();
        CHECK(power / (1000.0 * T) == doctest::Approx(1.0).epsilon(0.05));
    }
    SUBCASE("difference of two seeds has variance 2 sigma^2") {
        const double snr = 10.0;
        const double sigma2 = std::pow(10.0, -snr / 10.0);
        double power = 0.0;
        for (std::uint64_t trial = 0; trial < 1000; ++trial) {
            power += (add_noise(clean, snr, 2 * trial) - add_noise(clean, snr, 2 * trial + 1)).squaredNorm();
        }
        CHECK(power / (1000.0 * T) == doctest::Approx(2.0 * sigma2).epsilon(0.10));
    }
    SUBCASE("real and imaginary parts split the variance") {
        const ComplexSeries zeros = ComplexSeries::Zero(T);
        double re = 0.0;
        double im = 0.0;
        for (std::uint64_t seed = 0; seed < 500; ++seed) {
            const auto n = add_noise(zeros, 3.0, seed);
            re += n.real().squaredNorm();
            im += n.imag().squaredNorm();
        }
        CHECK(re / im == doctest::Approx(1.0).epsilon(0.05));
    }
}
