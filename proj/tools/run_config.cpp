#include "run_config.hpp"

#include <fstream>
#include <stdexcept>

namespace tfnet::cli {

using nlohmann::json;

json to_json(const RunConfig& config) {
    json body;
    if (config.command == "gen") {
        const auto& o = config.gen;
        body = {{"class", o.signal_class}, {"snr", o.snr},     {"count", o.count},
                {"seed", o.seed},          {"length", o.length}, {"out", o.out}};
    } else if (config.command == "train") {
        const auto& o = config.train;
        body = {{"data", o.data},         {"epochs", o.epochs},     {"batch", o.batch},
                {"lr", o.lr},             {"patience", o.patience}, {"seed", o.seed},
                {"layers", o.layers},     {"channels", o.channels}, {"kernel", o.kernel},
                {"max_train", o.max_train}, {"max_val", o.max_val}, {"max_steps", o.max_steps},
                {"out", o.out}};
    } else if (config.command == "eval") {
        const auto& o = config.eval;
        body = {{"cases", o.cases},   {"methods", o.methods}, {"snrs", o.snrs},   {"weights", o.weights},
                {"trials", o.trials}, {"seed", o.seed},       {"render", o.render}, {"out", o.out}};
    } else {
        throw std::invalid_argument("unknown command '" + config.command + "'");
    }
    return {{"command", config.command}, {"options", body}};
}

RunConfig run_config_from_json(const json& value) {
    RunConfig config;
    config.command = value.at("command").get<std::string>();
    const auto& o = value.at("options");
    if (config.command == "gen") {
        auto& g = config.gen;
        g.signal_class = o.at("class").get<std::string>();
        g.snr = o.at("snr").get<std::string>();
        g.count = o.at("count").get<std::size_t>();
        g.seed = o.at("seed").get<std::uint64_t>();
        g.length = o.at("length").get<std::size_t>();
        g.out = o.at("out").get<std::string>();
    } else if (config.command == "train") {
        auto& t = config.train;
        t.data = o.at("data").get<std::vector<std::string>>();
        t.epochs = o.at("epochs").get<std::size_t>();
        t.batch = o.at("batch").get<std::size_t>();
        t.lr = o.at("lr").get<double>();
        t.patience = o.at("patience").get<std::size_t>();
        t.seed = o.at("seed").get<std::uint64_t>();
        t.layers = o.at("layers").get<std::size_t>();
        t.channels = o.at("channels").get<std::size_t>();
        t.kernel = o.at("kernel").get<std::size_t>();
        t.max_train = o.at("max_train").get<std::size_t>();
        t.max_val = o.at("max_val").get<std::size_t>();
        t.max_steps = o.at("max_steps").get<std::size_t>();
        t.out = o.at("out").get<std::string>();
    } else if (config.command == "eval") {
        auto& e = config.eval;
        e.cases = o.at("cases").get<std::vector<int>>();
        e.methods = o.at("methods").get<std::vector<std::string>>();
        e.snrs = o.at("snrs").get<std::vector<std::string>>();
        e.weights = o.at("weights").get<std::string>();
        e.trials = o.at("trials").get<std::size_t>();
        e.seed = o.at("seed").get<std::uint64_t>();
        e.render = o.at("render").get<bool>();
        e.out = o.at("out").get<std::string>();
    } else {
        throw std::invalid_argument("unknown command '" + config.command + "'");
    }
    return config;
}

void write_run_config(const RunConfig& config, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto path = dir / "run.json";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << to_json(config).dump(2) << '\n';
}

RunConfig read_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open run config " + path.string());
    return run_config_from_json(json::parse(in));
}

}  // namespace tfnet::cli
