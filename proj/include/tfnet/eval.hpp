#pragma once

#include "tfnet/baselines.hpp"
#include "tfnet/dcnn.hpp"
#include "tfnet/signals.hpp"
#include "tfnet/tfr.hpp"

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tfnet {

struct CaseStudy {
    int id = 1;
    std::string name;
    MulticomponentModel model;
};

/// Case 1: two closely located NLFMs; case 2: two crossing NLFMs; case 3: crossing LFM and SFM.
/// All use T = 128 and unit amplitudes. Throws std::invalid_argument for other ids.
CaseStudy case_study(int id);
std::vector<CaseStudy> all_case_studies();

inline constexpr double kNmseFloorDb = -120.0;

/// 10*log10(||Y - E||^2 / ||Y||^2) after scaling Y and E to unit Frobenius norm. An all-zero
/// estimate scores 0 dB; an exact match scores the -120 dB floor. Throws on an all-zero Y.
double nmse_trial_db(const TFImage& reference, const TFImage& estimate);

/// Mean of nmse_trial_db over the estimates.
double nmse(const TFImage& reference, std::span<const TFImage> estimates);

enum class Method { Wvd, Omp, L1Prox, Dcnn };

std::string to_string(Method method);
/// Accepts wvd, omp, l1prox, dcnn.
Method parse_method(std::string_view name);

struct MethodContext {
    /// Required for Method::Dcnn.
    const Network<float>* network = nullptr;
    OmpConfig omp;
    L1ProxConfig l1prox;
};

/// TFR estimate of one noisy realization. WVD is the normalized WVD itself; DCNN output is
/// clamped at zero.
TFImage apply_method(Method method, const ComplexSeries& noisy, const MethodContext& context);

struct NmseReport {
    int case_id = 1;
    double snr_db = kNoiseFree;
    Method method = Method::Wvd;
    std::size_t trials = 0;
    double nmse_db = 0.0;
    std::vector<double> trial_db;
};

struct TrialImages {
    TFImage model;
    TFImage input;
    TFImage estimate;
};

/// Trial noise seeds are mix_seed(master_seed, trial); dB values are averaged in trial order.
/// When `last` is given it receives the images of the final trial.
NmseReport run_case(const CaseStudy& study, Method method, double snr_db, std::size_t trials,
                    std::uint64_t master_seed, const MethodContext& context, TrialImages* last = nullptr);

/// Cross product ordered by case, then SNR, then method, each in the order given.
std::vector<NmseReport> comparison_table(std::span<const Method> methods, std::span<const CaseStudy> cases,
                                         std::span<const double> snrs, std::size_t trials,
                                         std::uint64_t master_seed, const MethodContext& context);

/// Header `case,snr_db,method,K,nmse_db`; infinite SNR is written as `inf`.
void write_csv(std::ostream& out, std::span<const NmseReport> reports);

inline constexpr double kRenderRangeDb = 15.0;

/// Grey levels of the log-magnitude rendering: negatives clamp to 0, values are expressed in dB
/// relative to the maximum, floored at -15 dB, and mapped linearly onto 0..255. Returned in
/// row-major (time, frequency) order. Throws std::domain_error on a nonpositive maximum.
std::vector<std::uint8_t> log_gray_levels(const TFImage& image);

/// Writes a binary PGM (P5, maxval 255) with time along x and frequency increasing upward.
void render_log_image(const TFImage& image, const std::filesystem::path& path);

}  // namespace tfnet
