#include "tfnet/trainer.hpp"

#include "tfnet/parallel.hpp"
#include "tfnet/rng.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace tfnet {

namespace {

std::vector<std::size_t> epoch_order(std::size_t count, std::uint64_t seed, std::size_t epoch) {
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix_seed(seed, epoch));
    for (std::size_t i = count; i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
    }
    return order;
}

}  // namespace

double evaluate_loss(const Network<float>& net, std::span<const ImagePair> samples) {
    if (samples.empty()) throw std::invalid_argument("evaluate_loss needs samples");
    std::vector<double> errors(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
        errors[i] = (forward(net, samples[i].input) - samples[i].label).squaredNorm();
    });
    return std::accumulate(errors.begin(), errors.end(), 0.0) / (2.0 * static_cast<double>(samples.size()));
}

TrainResult train(Network<float> net, std::span<const ImagePair> train_set, std::span<const ImagePair> val_set,
                  const TrainConfig& config, const TrainObserver& observer) {
    if (train_set.empty() || val_set.empty()) throw std::invalid_argument("training and validation sets must be nonempty");
    if (config.batch_size < 1 || config.epochs < 1) throw std::invalid_argument("batch size and epochs must be >= 1");
    net.validate();
    net.info.train_seed = config.shuffle_seed;

    // Converted once; the float copies are what the network sees every epoch.
    std::vector<FeatureMaps<float>> inputs;
    std::vector<FeatureMaps<float>> labels;
    inputs.reserve(train_set.size());
    labels.reserve(train_set.size());
    for (const auto& pair : train_set) {
        inputs.push_back(to_feature_maps<float>(pair.input));
        labels.push_back(to_feature_maps<float>(pair.label));
    }

    AdamState<float> adam;
    adam.hyper.learning_rate = config.learning_rate;

    TrainResult result;
    auto& history = result.history;
    history.initial_validation = evaluate_loss(net, val_set);
    history.best_validation = history.initial_validation;
    result.network = net;

    std::size_t stale_epochs = 0;
    bool stop = false;
    for (std::size_t epoch = 1; epoch <= config.epochs && !stop; ++epoch) {
        const auto order = epoch_order(train_set.size(), config.shuffle_seed, epoch);
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size() && !stop; start += config.batch_size, ++batch_index) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            std::vector<FeatureMaps<float>> batch_inputs;
            std::vector<FeatureMaps<float>> batch_labels;
            for (std::size_t i = start; i < end; ++i) {
                batch_inputs.push_back(inputs[order[i]]);
                batch_labels.push_back(labels[order[i]]);
            }
            auto gradient = backward<float>(net, batch_inputs, batch_labels);
            if (!std::isfinite(gradient.loss)) {
                throw TrainingDiverged("non-finite training loss at epoch " + std::to_string(epoch) + ", batch " +
                                       std::to_string(batch_index) + "; lower the learning rate");
            }
            adam_step(net, gradient.gradients, adam);
            ++history.steps;
            history.batches.push_back({epoch, batch_index, gradient.loss});
            if (observer && !observer({TrainEvent::Kind::Batch, epoch, batch_index, history.steps, gradient.loss, &net})) {
                stop = true;
            }
            if (config.max_steps != 0 && history.steps >= config.max_steps) stop = true;
        }

        const double val_loss = evaluate_loss(net, val_set);
        if (!std::isfinite(val_loss)) {
            throw TrainingDiverged("non-finite validation loss after epoch " + std::to_string(epoch));
        }
        history.validation.push_back(val_loss);
        if (observer && !observer({TrainEvent::Kind::Epoch, epoch, batch_index, history.steps, val_loss, &net})) stop = true;
        if (val_loss < history.best_validation) {
            history.best_validation = val_loss;
            history.best_epoch = epoch;
            result.network = net;
            stale_epochs = 0;
        } else if (++stale_epochs >= config.patience) {
            stop = true;
        }
    }
    return result;
}

}  // namespace tfnet
