#pragma once

#include "tfnet/rng.hpp"
#include "tfnet/signals.hpp"
#include "tfnet/tfr.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tfnet {

enum class SignalClass { TwoNlfm, LfmPlusSfm };

std::string to_string(SignalClass signal_class);
/// Accepts "two-nlfm" and "lfm-sfm"; throws std::invalid_argument otherwise.
SignalClass parse_signal_class(std::string_view name);

inline constexpr std::size_t kRecordLength = 128;
inline constexpr std::size_t kMinDatasetCount = 5;
inline constexpr int kManifestFormatVersion = 1;
inline constexpr std::string_view kSnrConvention =
    "per-sample complex noise variance 10^(-snr_db/10) relative to one unit-amplitude component";

/// IF band every generated component must stay inside.
inline constexpr double kBandLow = 0.03;
inline constexpr double kBandHigh = 0.47;

struct SampleSpec {
    SignalClass signal_class = SignalClass::TwoNlfm;
    MulticomponentModel model;
    double noise_snr_db = kNoiseFree;
    std::uint64_t noise_seed = 0;

    bool operator==(const SampleSpec&) const = default;
};

/// Cubic phase law whose (quadratic) IF passes through f0 at t=0, f_mid at t=T/2 and f_end at t=T.
CubicLaw cubic_from_control_points(double f0, double f_mid, double f_end);

/// Draws one random two-component model of the given class (noise fields left at defaults).
/// Throws std::runtime_error after 1000 rejected draws.
SampleSpec sample_params(SignalClass signal_class, Rng& rng, std::size_t length = kRecordLength);

struct ImagePair {
    TFImage input;
    TFImage label;
};

/// Input = normalized WVD of the noisy realization; label = ideal TFR of the noise-free model.
ImagePair build_sample(const SampleSpec& spec);

struct SampleRecord {
    SampleSpec spec;
    bool train = true;
    std::uint64_t input_offset = 0;
    std::uint64_t label_offset = 0;

    bool operator==(const SampleRecord&) const = default;
};

struct DatasetManifest {
    int format_version = kManifestFormatVersion;
    SignalClass signal_class = SignalClass::TwoNlfm;
    double noise_snr_db = kNoiseFree;
    std::uint64_t master_seed = 0;
    std::size_t length = kRecordLength;
    std::size_t train_count = 0;
    std::size_t val_count = 0;
    std::string tensor_file = "samples.tft";
    std::string snr_convention{kSnrConvention};
    std::string rng{kRngDescription};
    std::vector<SampleRecord> samples;

    bool operator==(const DatasetManifest&) const = default;
};

inline constexpr std::string_view kManifestFileName = "manifest.json";

/// Infinite SNR is stored as "inf"; NaN (mixed noise levels) as null.
nlohmann::json snr_to_json(double snr_db);
double snr_from_json(const nlohmann::json& value);
std::string format_snr(double snr_db);
/// Accepts "inf" (any case) or a decimal number.
double parse_snr(std::string_view text);

nlohmann::json to_json(const MulticomponentModel& model);
MulticomponentModel model_from_json(const nlohmann::json& value);
nlohmann::json to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& value);

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Number of training samples for a corpus of `count` (first 80 % in draw order).
std::size_t train_split_count(std::size_t count);

/// Signal parameters depend only on (signal_class, master_seed) so every noise level shares them;
/// noise seeds are derived per sample index. Writes `samples.tft` and `manifest.json` into out_dir.
DatasetManifest generate_dataset(SignalClass signal_class, double noise_snr_db, std::size_t count,
                                 std::uint64_t master_seed, const std::filesystem::path& out_dir,
                                 std::size_t length = kRecordLength);

enum class Split { Train, Validation, All };

/// Loads stored pairs of one split, in manifest order.
std::vector<ImagePair> load_pairs(const std::filesystem::path& dataset_dir, Split split);

/// Loads one stored pair by sample index.
ImagePair load_pair(const std::filesystem::path& dataset_dir, const DatasetManifest& manifest, std::size_t index);

}  // namespace tfnet
