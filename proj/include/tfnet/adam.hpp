#pragma once

#include "tfnet/dcnn.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace tfnet {

/// Defaults are the standard Adam hyperparameters.
struct AdamHyperparameters {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// First and second moments per parameter tensor, in the same order as the parameters.
template <typename Scalar>
struct AdamState {
    AdamHyperparameters hyper;
    std::uint64_t step = 0;
    std::vector<std::vector<Scalar>> first_moment;
    std::vector<std::vector<Scalar>> second_moment;
};

/// One bias-corrected Adam update over a list of parameter tensors. Moments are allocated
/// on the first call. Throws std::invalid_argument when shapes disagree.
template <typename Scalar>
void adam_step(std::span<const std::span<Scalar>> params, std::span<const std::span<const Scalar>> grads,
               AdamState<Scalar>& state);

/// Network convenience: parameters ordered layer by layer, weights before bias.
template <typename Scalar>
void adam_step(Network<Scalar>& net, const Gradients<Scalar>& grads, AdamState<Scalar>& state);

}  // namespace tfnet
