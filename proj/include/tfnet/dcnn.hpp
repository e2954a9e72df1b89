#pragma once

#include "tfnet/tfr.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace tfnet {

/// Activations stored channels-last: values[(y * width + x) * channels + c].
template <typename Scalar>
struct FeatureMaps {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    std::vector<Scalar> values;

    FeatureMaps() = default;
    FeatureMaps(std::size_t h, std::size_t w, std::size_t c) : height(h), width(w), channels(c), values(h * w * c) {}

    Scalar& at(std::size_t y, std::size_t x, std::size_t c) { return values[(y * width + x) * channels + c]; }
    Scalar at(std::size_t y, std::size_t x, std::size_t c) const { return values[(y * width + x) * channels + c]; }
};

template <typename Scalar>
FeatureMaps<Scalar> to_feature_maps(const TFImage& image);
template <typename Scalar>
TFImage to_image(const FeatureMaps<Scalar>& maps);

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Same-size convolution layer. weights are laid out [out][in][ky][kx]. The operation is a
/// stride-1 cross-correlation with (kernel-1)/2 zero padding, plus bias, then optional ReLU.
template <typename Scalar>
struct ConvLayer {
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
    std::size_t kernel = 1;
    bool relu = false;
    std::vector<Scalar> weights;
    std::vector<Scalar> bias;

    ConvLayer() = default;
    ConvLayer(std::size_t in, std::size_t out, std::size_t k, bool has_relu)
        : in_channels(in), out_channels(out), kernel(k), relu(has_relu), weights(out * in * k * k), bias(out) {}

    Scalar& weight(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx) {
        return weights[((o * in_channels + i) * kernel + ky) * kernel + kx];
    }
    Scalar weight(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx) const {
        return weights[((o * in_channels + i) * kernel + ky) * kernel + kx];
    }

    /// Throws ShapeError on an even kernel or mis-sized buffers.
    void validate() const;
};

struct NetworkInfo {
    std::size_t depth = 12;
    std::size_t channels = 40;
    std::size_t kernel = 5;
    double noise_snr_db = kNoiseFree;
    std::uint64_t init_seed = 0;
    std::uint64_t train_seed = 0;
};

/// Layer 1 maps 1 -> C channels, layers 2..N-1 map C -> C, all with ReLU; layer N maps C -> 1
/// without an activation.
template <typename Scalar>
struct Network {
    std::vector<ConvLayer<Scalar>> layers;
    NetworkInfo info;

    void validate() const;
    std::size_t parameter_count() const;

    template <typename Other>
    Network<Other> cast() const;
};

/// He-normal weights (std sqrt(2 / (in_channels * D^2))), zero biases, deterministic in seed.
template <typename Scalar>
Network<Scalar> init_weights(std::size_t depth, std::size_t channels, std::size_t kernel, std::uint64_t seed);

template <typename Scalar>
FeatureMaps<Scalar> conv_forward(const FeatureMaps<Scalar>& input, const ConvLayer<Scalar>& layer);

/// Runs every layer; returns all activations, index 0 being the input.
template <typename Scalar>
std::vector<FeatureMaps<Scalar>> forward_trace(const Network<Scalar>& net, const FeatureMaps<Scalar>& input);

template <typename Scalar>
FeatureMaps<Scalar> forward(const Network<Scalar>& net, const FeatureMaps<Scalar>& input);

/// Image-level inference in the network's precision.
template <typename Scalar>
TFImage forward(const Network<Scalar>& net, const TFImage& input);

/// (1 / (2M)) * sum_m ||prediction_m - label_m||_F^2. Throws on empty or mismatched input.
double mse_loss(std::span<const TFImage> predictions, std::span<const TFImage> labels);

template <typename Scalar>
struct Gradients {
    std::vector<std::vector<Scalar>> weights;
    std::vector<std::vector<Scalar>> bias;

    static Gradients zeros_like(const Network<Scalar>& net);
    void add(const Gradients& other);
};

template <typename Scalar>
struct BatchGradient {
    double loss = 0.0;
    Gradients<Scalar> gradients;
};

/// Exact gradient of the batch loss (1 / (2M)) * sum ||forward(x_m) - y_m||^2, M = batch size.
/// Per-sample gradients are reduced in index order so the result does not depend on threading.
template <typename Scalar>
BatchGradient<Scalar> backward(const Network<Scalar>& net, std::span<const FeatureMaps<Scalar>> inputs,
                               std::span<const FeatureMaps<Scalar>> labels);

}  // namespace tfnet
