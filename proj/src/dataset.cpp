#include "tfnet/dataset.hpp"

#include "tfnet/parallel.hpp"
#include "tfnet/tensor_file.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tfnet {

using nlohmann::json;

namespace {

constexpr int kMaxRejections = 1000;
constexpr std::uint64_t kNoiseStreamSalt = 0x6E6F697365ULL;

std::uint64_t class_tag(SignalClass signal_class) {
    return signal_class == SignalClass::TwoNlfm ? 0x4E4C464DULL : 0x53464DULL;
}

bool in_band(const PhaseLaw& law, std::size_t length) {
    // Sample the closed interval [0, T] so the control point at t = T is included.
    for (std::size_t t = 0; t <= length; ++t) {
        const double f = instantaneous_frequency(law, static_cast<double>(t), length);
        if (f < kBandLow || f > kBandHigh) return false;
    }
    return true;
}

bool curves_distinct(const PhaseLaw& a, const PhaseLaw& b, std::size_t length) {
    std::size_t separated = 0;
    for (std::size_t t = 0; t < length; ++t) {
        const double gap = std::abs(instantaneous_frequency(a, static_cast<double>(t), length) -
                                    instantaneous_frequency(b, static_cast<double>(t), length));
        if (gap > 0.01) ++separated;
    }
    return 2 * separated >= length;
}

ComponentModel unit(PhaseLaw law) { return ComponentModel{1.0, law}; }

std::vector<float> to_floats(const TFImage& image) {
    // Row-major: time rows, frequency columns.
    std::vector<float> values(static_cast<std::size_t>(image.size()));
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < image.rows(); ++r) {
        for (Eigen::Index c = 0; c < image.cols(); ++c) values[i++] = static_cast<float>(image(r, c));
    }
    return values;
}

TFImage from_floats(const std::vector<float>& values, std::size_t rows, std::size_t cols) {
    TFImage image(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < image.rows(); ++r) {
        for (Eigen::Index c = 0; c < image.cols(); ++c) image(r, c) = values[i++];
    }
    return image;
}

}  // namespace

std::string to_string(SignalClass signal_class) {
    return signal_class == SignalClass::TwoNlfm ? "two-nlfm" : "lfm-sfm";
}

SignalClass parse_signal_class(std::string_view name) {
    if (name == "two-nlfm") return SignalClass::TwoNlfm;
    if (name == "lfm-sfm") return SignalClass::LfmPlusSfm;
    throw std::invalid_argument("unknown signal class '" + std::string(name) + "' (expected two-nlfm or lfm-sfm)");
}

CubicLaw cubic_from_control_points(double f0, double f_mid, double f_end) {
    // f(u) = c1 + 2 c2 u + 3 c3 u^2 with u = t/T at u = 0, 1/2, 1.
    Eigen::Matrix3d system;
    system << 1.0, 0.0, 0.0,
              1.0, 1.0, 0.75,
              1.0, 2.0, 3.0;
    const Eigen::Vector3d c = system.partialPivLu().solve(Eigen::Vector3d(f0, f_mid, f_end));
    return CubicLaw{c[0], c[1], c[2]};
}

SampleSpec sample_params(SignalClass signal_class, Rng& rng, std::size_t length) {
    SampleSpec spec;
    spec.signal_class = signal_class;
    spec.model.length = length;
    for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
        if (signal_class == SignalClass::TwoNlfm) {
            std::array<PhaseLaw, 2> laws;
            for (auto& law : laws) {
                const double f0 = rng.uniform(0.05, 0.45);
                const double f_mid = rng.uniform(0.05, 0.45);
                const double f_end = rng.uniform(0.05, 0.45);
                law = cubic_from_control_points(f0, f_mid, f_end);
            }
            if (!in_band(laws[0], length) || !in_band(laws[1], length)) continue;
            if (!curves_distinct(laws[0], laws[1], length)) continue;
            spec.model.components = {unit(laws[0]), unit(laws[1])};
            return spec;
        }
        const double f_start = rng.uniform(0.05, 0.45);
        const double f_stop = rng.uniform(0.05, 0.45);
        const CubicLaw lfm{f_start, (f_stop - f_start) / 2.0, 0.0};
        SinusoidalLaw sfm;
        sfm.fc = rng.uniform(0.15, 0.35);
        sfm.fd = rng.uniform(0.05, 0.15);
        sfm.r = rng.uniform(0.5, 2.0);
        sfm.psi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        if (sfm.fc - sfm.fd < kBandLow || sfm.fc + sfm.fd > kBandHigh) continue;
        spec.model.components = {unit(lfm), unit(sfm)};
        return spec;
    }
    throw std::runtime_error("sample_params: " + std::to_string(kMaxRejections) +
                             " consecutive draws rejected for class " + to_string(signal_class));
}

ImagePair build_sample(const SampleSpec& spec) {
    const ComplexSeries clean = synthesize(spec.model);
    const ComplexSeries noisy = add_noise(clean, spec.noise_snr_db, spec.noise_seed);
    return ImagePair{normalize_input(wvd(noisy)), ideal_tfr(spec.model)};
}

json snr_to_json(double snr_db) {
    if (std::isnan(snr_db)) return nullptr;
    if (std::isinf(snr_db) && snr_db > 0) return "inf";
    return snr_db;
}

double snr_from_json(const json& value) {
    if (value.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (value.is_string()) return parse_snr(value.get<std::string>());
    return value.get<double>();
}

std::string format_snr(double snr_db) {
    if (std::isinf(snr_db) && snr_db > 0) return "inf";
    std::array<char, 64> buffer{};
    const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), snr_db);
    return std::string(buffer.data(), result.ptr);
}

double parse_snr(std::string_view text) {
    std::string lowered(text);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lowered == "inf" || lowered == "+inf" || lowered == "infinity") return kNoiseFree;
    double value = 0.0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc{} || result.ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw std::invalid_argument("invalid SNR '" + std::string(text) + "' (expected a number or inf)");
    }
    return value;
}

json to_json(const MulticomponentModel& model) {
    json components = json::array();
    for (const auto& component : model.components) {
        json phase;
        if (const auto* cubic = std::get_if<CubicLaw>(&component.phase)) {
            phase = {{"type", "cubic"}, {"c1", cubic->c1}, {"c2", cubic->c2}, {"c3", cubic->c3}};
        } else {
            const auto& s = std::get<SinusoidalLaw>(component.phase);
            phase = {{"type", "sinusoidal"}, {"fc", s.fc}, {"fd", s.fd}, {"r", s.r}, {"psi", s.psi}};
        }
        components.push_back({{"amplitude", component.amplitude}, {"phase", phase}});
    }
    return {{"length", model.length}, {"components", components}};
}

MulticomponentModel model_from_json(const json& value) {
    MulticomponentModel model;
    model.length = value.at("length").get<std::size_t>();
    for (const auto& item : value.at("components")) {
        ComponentModel component;
        component.amplitude = item.at("amplitude").get<double>();
        const auto& phase = item.at("phase");
        const auto type = phase.at("type").get<std::string>();
        if (type == "cubic") {
            component.phase = CubicLaw{phase.at("c1").get<double>(), phase.at("c2").get<double>(),
                                       phase.at("c3").get<double>()};
        } else if (type == "sinusoidal") {
            component.phase = SinusoidalLaw{phase.at("fc").get<double>(), phase.at("fd").get<double>(),
                                            phase.at("r").get<double>(), phase.at("psi").get<double>()};
        } else {
            throw std::invalid_argument("unknown phase law type '" + type + "'");
        }
        model.components.push_back(component);
    }
    return model;
}

json to_json(const DatasetManifest& manifest) {
    json samples = json::array();
    for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
        const auto& record = manifest.samples[i];
        samples.push_back({
            {"index", i},
            {"split", record.train ? "train" : "val"},
            {"class", to_string(record.spec.signal_class)},
            {"model", to_json(record.spec.model)},
            {"noise_snr_db", snr_to_json(record.spec.noise_snr_db)},
            {"noise_seed", record.spec.noise_seed},
            {"input_offset", record.input_offset},
            {"label_offset", record.label_offset},
        });
    }
    return {
        {"format_version", manifest.format_version},
        {"class", to_string(manifest.signal_class)},
        {"noise_snr_db", snr_to_json(manifest.noise_snr_db)},
        {"master_seed", manifest.master_seed},
        {"length", manifest.length},
        {"count", manifest.samples.size()},
        {"train_count", manifest.train_count},
        {"val_count", manifest.val_count},
        {"tensor_file", manifest.tensor_file},
        {"tensor_layout", "TFT1 header dims [count, 2, T, T]; per sample input block then label block; "
                          "float32 little-endian, row = time, column = frequency bin k/(2T)"},
        {"snr_convention", manifest.snr_convention},
        {"rng", manifest.rng},
        {"samples", samples},
    };
}

DatasetManifest manifest_from_json(const json& value) {
    DatasetManifest manifest;
    manifest.format_version = value.at("format_version").get<int>();
    if (manifest.format_version != kManifestFormatVersion) {
        throw std::runtime_error("unsupported manifest format version " + std::to_string(manifest.format_version));
    }
    manifest.signal_class = parse_signal_class(value.at("class").get<std::string>());
    manifest.noise_snr_db = snr_from_json(value.at("noise_snr_db"));
    manifest.master_seed = value.at("master_seed").get<std::uint64_t>();
    manifest.length = value.at("length").get<std::size_t>();
    manifest.train_count = value.at("train_count").get<std::size_t>();
    manifest.val_count = value.at("val_count").get<std::size_t>();
    manifest.tensor_file = value.at("tensor_file").get<std::string>();
    manifest.snr_convention = value.at("snr_convention").get<std::string>();
    manifest.rng = value.at("rng").get<std::string>();
    for (const auto& item : value.at("samples")) {
        SampleRecord record;
        record.train = item.at("split").get<std::string>() == "train";
        record.spec.signal_class = parse_signal_class(item.at("class").get<std::string>());
        record.spec.model = model_from_json(item.at("model"));
        record.spec.noise_snr_db = snr_from_json(item.at("noise_snr_db"));
        record.spec.noise_seed = item.at("noise_seed").get<std::uint64_t>();
        record.input_offset = item.at("input_offset").get<std::uint64_t>();
        record.label_offset = item.at("label_offset").get<std::uint64_t>();
        manifest.samples.push_back(std::move(record));
    }
    return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
    out << to_json(manifest).dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing manifest: " + path.string());
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path.string());
    try {
        return manifest_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed manifest " + path.string() + ": " + e.what());
    }
}

std::size_t train_split_count(std::size_t count) { return count * 4 / 5; }

DatasetManifest generate_dataset(SignalClass signal_class, double noise_snr_db, std::size_t count,
                                 std::uint64_t master_seed, const std::filesystem::path& out_dir,
                                 std::size_t length) {
    if (count < kMinDatasetCount) {
        throw std::invalid_argument("dataset count must be at least " + std::to_string(kMinDatasetCount));
    }
    DatasetManifest manifest;
    manifest.signal_class = signal_class;
    manifest.noise_snr_db = noise_snr_db;
    manifest.master_seed = master_seed;
    manifest.length = length;
    manifest.train_count = train_split_count(count);
    manifest.val_count = count - manifest.train_count;

    Rng parameter_stream(mix_seed(master_seed, class_tag(signal_class)));
    const std::uint64_t noise_root = mix_seed(master_seed, kNoiseStreamSalt);
    manifest.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        auto& record = manifest.samples[i];
        record.spec = sample_params(signal_class, parameter_stream, length);
        record.spec.noise_snr_db = noise_snr_db;
        record.spec.noise_seed = mix_seed(noise_root, i);
        record.train = i < manifest.train_count;
    }

    std::vector<ImagePair> pairs(count);
    parallel_for(count, [&](std::size_t i) { pairs[i] = build_sample(manifest.samples[i].spec); });

    std::filesystem::create_directories(out_dir);
    const auto side = static_cast<std::uint32_t>(length);
    const std::array<std::uint32_t, 4> dims = {static_cast<std::uint32_t>(count), 2, side, side};
    TensorFileWriter writer(out_dir / manifest.tensor_file, dims);
    for (std::size_t i = 0; i < count; ++i) {
        manifest.samples[i].input_offset = writer.write_block(to_floats(pairs[i].input));
        manifest.samples[i].label_offset = writer.write_block(to_floats(pairs[i].label));
    }
    writer.close();
    save_manifest(manifest, out_dir / kManifestFileName);
    return manifest;
}

ImagePair load_pair(const std::filesystem::path& dataset_dir, const DatasetManifest& manifest, std::size_t index) {
    const auto& record = manifest.samples.at(index);
    const auto path = dataset_dir / manifest.tensor_file;
    const std::size_t pixels = manifest.length * manifest.length;
    return ImagePair{
        from_floats(read_tensor_block(path, record.input_offset, pixels), manifest.length, manifest.length),
        from_floats(read_tensor_block(path, record.label_offset, pixels), manifest.length, manifest.length)};
}

std::vector<ImagePair> load_pairs(const std::filesystem::path& dataset_dir, Split split) {
    const auto manifest = load_manifest(dataset_dir / kManifestFileName);
    const auto path = dataset_dir / manifest.tensor_file;
    const auto header = read_tensor_header(path);
    if (header.dims.size() != 4 || header.dims[0] != manifest.samples.size() || header.dims[2] != manifest.length) {
        throw std::runtime_error("tensor file shape does not match manifest: " + path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open tensor file: " + path.string());
    const std::size_t pixels = manifest.length * manifest.length;
    std::vector<float> buffer(pixels);
    auto read_image = [&](std::uint64_t offset) {
        in.seekg(static_cast<std::streamoff>(offset));
        read_f32_le(in, buffer);
        if (!in) throw std::runtime_error("truncated tensor file: " + path.string());
        return from_floats(buffer, manifest.length, manifest.length);
    };
    std::vector<ImagePair> pairs;
    for (const auto& record : manifest.samples) {
        const bool wanted = split == Split::All || (split == Split::Train) == record.train;
        if (!wanted) continue;
        pairs.push_back(ImagePair{read_image(record.input_offset), read_image(record.label_offset)});
    }
    return pairs;
}

}  // namespace tfnet
