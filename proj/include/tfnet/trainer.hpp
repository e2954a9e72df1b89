#pragma once

#include "tfnet/adam.hpp"
#include "tfnet/dataset.hpp"
#include "tfnet/dcnn.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace tfnet {

struct TrainConfig {
    std::size_t batch_size = 32;
    std::size_t epochs = 50;
    double learning_rate = 1e-3;
    std::size_t patience = 10;
    std::uint64_t shuffle_seed = 0;
    /// Stop after this many optimizer steps; 0 means no limit.
    std::size_t max_steps = 0;
};

/// Raised when a batch loss becomes NaN or infinite.
class TrainingDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BatchLoss {
    std::size_t epoch = 0;
    std::size_t batch = 0;
    double loss = 0.0;
};

struct TrainHistory {
    std::vector<BatchLoss> batches;
    /// Validation loss after each completed epoch.
    std::vector<double> validation;
    double initial_validation = 0.0;
    /// Epoch whose parameters were kept; 0 means the initial parameters.
    std::size_t best_epoch = 0;
    double best_validation = 0.0;
    std::size_t steps = 0;
};

struct TrainEvent {
    enum class Kind { Batch, Epoch } kind = Kind::Batch;
    std::size_t epoch = 0;
    std::size_t batch = 0;
    std::size_t step = 0;
    double loss = 0.0;
    /// Parameters after this step (or epoch); valid only during the callback.
    const Network<float>* network = nullptr;
};

struct TrainResult {
    Network<float> network;
    TrainHistory history;
};

/// Observer for progress reporting; returning false stops training after the current step.
using TrainObserver = std::function<bool(const TrainEvent&)>;

/// Validation loss (1 / (2M)) * sum ||forward(x) - y||^2 over a whole set.
double evaluate_loss(const Network<float>& net, std::span<const ImagePair> samples);

/// Mini-batch Adam training. Each epoch shuffles with a generator seeded from
/// (shuffle_seed, epoch); the last batch may be partial. Keeps the parameters with the lowest
/// validation loss (the initial parameters included) and stops after `patience` epochs without
/// improvement. Throws TrainingDiverged on a non-finite loss.
TrainResult train(Network<float> net, std::span<const ImagePair> train_set, std::span<const ImagePair> val_set,
                  const TrainConfig& config, const TrainObserver& observer = {});

}  // namespace tfnet
