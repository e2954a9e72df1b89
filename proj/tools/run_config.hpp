#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tfnet::cli {

struct GenOptions {
    std::string signal_class = "two-nlfm";
    std::string snr = "inf";
    std::size_t count = 1500;
    std::uint64_t seed = 0;
    std::size_t length = 128;
    std::string out;
};

struct TrainOptions {
    std::vector<std::string> data;
    std::size_t epochs = 50;
    std::size_t batch = 32;
    double lr = 1e-3;
    std::size_t patience = 10;
    std::uint64_t seed = 0;
    std::size_t layers = 12;
    std::size_t channels = 40;
    std::size_t kernel = 5;
    std::size_t max_train = 0;
    std::size_t max_val = 0;
    std::size_t max_steps = 0;
    std::string out;
};

struct EvalOptions {
    std::vector<int> cases = {1, 2, 3};
    std::vector<std::string> methods = {"wvd", "omp", "l1prox"};
    std::vector<std::string> snrs = {"inf", "10", "5", "0"};
    std::string weights;
    std::size_t trials = 50;
    std::uint64_t seed = 0;
    bool render = false;
    std::string out;
};

/// Resolved invocation; `run.json` in every output directory holds one of these.
struct RunConfig {
    std::string command;
    GenOptions gen;
    TrainOptions train;
    EvalOptions eval;
};

nlohmann::json to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& value);

void write_run_config(const RunConfig& config, const std::filesystem::path& dir);
RunConfig read_run_config(const std::filesystem::path& path);

}  // namespace tfnet::cli
