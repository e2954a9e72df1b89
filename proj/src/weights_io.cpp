#include "tfnet/weights_io.hpp"

#include "tfnet/dataset.hpp"
#include "tfnet/tensor_file.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <fstream>
#include <stdexcept>

namespace tfnet {

namespace {

constexpr std::array<char, 4> kMagic = {'T', 'F', 'W', '1'};

}  // namespace

void save_network(const Network<float>& net, const std::filesystem::path& path) {
    net.validate();
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : net.layers) {
        layers.push_back({{"in_channels", layer.in_channels},
                          {"out_channels", layer.out_channels},
                          {"kernel", layer.kernel},
                          {"relu", layer.relu}});
    }
    const nlohmann::json header = {
        {"format_version", kWeightFormatVersion},
        {"N", net.info.depth},
        {"C", net.info.channels},
        {"D", net.info.kernel},
        {"noise_snr_db", snr_to_json(net.info.noise_snr_db)},
        {"init_seed", net.info.init_seed},
        {"train_seed", net.info.train_seed},
        {"layers", layers},
    };
    const std::string text = header.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open weight file for writing: " + path.string());
    out.write(kMagic.data(), kMagic.size());
    write_u32_le(out, static_cast<std::uint32_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& layer : net.layers) {
        write_f32_le(out, layer.weights);
        write_f32_le(out, layer.bias);
    }
    out.close();
    if (!out) throw std::runtime_error("failed writing weight file: " + path.string());
}

Network<float> load_network(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open weight file: " + path.string());
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw std::runtime_error("not a TFW1 weight file: " + path.string());
    const std::uint32_t length = read_u32_le(in);
    if (!in || length > (1u << 24)) throw std::runtime_error("corrupt weight header: " + path.string());
    std::string text(length, '\0');
    in.read(text.data(), length);
    if (!in) throw std::runtime_error("truncated weight header: " + path.string());

    Network<float> net;
    try {
        const auto header = nlohmann::json::parse(text);
        if (header.at("format_version").get<int>() != kWeightFormatVersion) {
            throw std::runtime_error("unsupported weight format version");
        }
        net.info.depth = header.at("N").get<std::size_t>();
        net.info.channels = header.at("C").get<std::size_t>();
        net.info.kernel = header.at("D").get<std::size_t>();
        net.info.noise_snr_db = snr_from_json(header.at("noise_snr_db"));
        net.info.init_seed = header.at("init_seed").get<std::uint64_t>();
        net.info.train_seed = header.at("train_seed").get<std::uint64_t>();
        for (const auto& item : header.at("layers")) {
            net.layers.emplace_back(item.at("in_channels").get<std::size_t>(),
                                    item.at("out_channels").get<std::size_t>(), item.at("kernel").get<std::size_t>(),
                                    item.at("relu").get<bool>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed weight header in " + path.string() + ": " + e.what());
    }
    for (auto& layer : net.layers) {
        read_f32_le(in, layer.weights);
        read_f32_le(in, layer.bias);
    }
    if (!in) throw std::runtime_error("truncated weight data: " + path.string());
    net.validate();
    return net;
}

}  // namespace tfnet
