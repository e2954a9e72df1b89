#include "tfnet/dcnn.hpp"

#include "tfnet/parallel.hpp"
#include "tfnet/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace tfnet {

namespace {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using MatrixMap = Eigen::Map<Matrix<Scalar>>;
template <typename Scalar>
using ConstMatrixMap = Eigen::Map<const Matrix<Scalar>>;

void require(bool condition, const std::string& message) {
    if (!condition) throw ShapeError(message);
}

template <typename Scalar>
using StridedView = Eigen::Map<const Matrix<Scalar>, 0, Eigen::OuterStride<>>;

/// Scratch buffers reused across calls on the same thread; fresh 10+ MB allocations per layer
/// cost more in page faults than the arithmetic.
template <typename Scalar>
struct Workspace {
    std::vector<Scalar> padded;
    std::vector<Scalar> wide;
};

template <typename Scalar>
Workspace<Scalar>& workspace() {
    thread_local Workspace<Scalar> scratch;
    return scratch;
}

/// Zero-padded channels-last copy of `input` with (kernel-1)/2 pixels on every side, plus a
/// zero tail so the strided views of the last row stay in bounds.
template <typename Scalar>
void pad_input(const FeatureMaps<Scalar>& input, std::size_t kernel, std::vector<Scalar>& padded) {
    const std::size_t pad = kernel / 2;
    const std::size_t C = input.channels;
    const std::size_t padded_width = input.width + 2 * pad;
    padded.assign((input.height + 2 * pad) * padded_width * C + kernel * C, Scalar(0));
    for (std::size_t y = 0; y < input.height; ++y) {
        std::copy_n(input.values.data() + y * input.width * C, input.width * C,
                    padded.data() + ((y + pad) * padded_width + pad) * C);
    }
}

/// View of the padded buffer for kernel row ky: column j = y * padded_width + x holds the
/// kernel * C values under the filter's row ky at output pixel (y, x), ordered (kx, channel).
/// Consecutive columns overlap; columns with x >= width are junk and get discarded.
template <typename Scalar>
StridedView<Scalar> kernel_row_view(const std::vector<Scalar>& padded, std::size_t ky, std::size_t height,
                                    std::size_t padded_width, std::size_t channels, std::size_t kernel) {
    return StridedView<Scalar>(padded.data() + ky * padded_width * channels,
                               static_cast<Eigen::Index>(kernel * channels),
                               static_cast<Eigen::Index>(height * padded_width),
                               Eigen::OuterStride<>(static_cast<Eigen::Index>(channels)));
}

/// Weights of kernel row ky as an out x (kx, in) matrix matching kernel_row_view.
template <typename Scalar>
Matrix<Scalar> pack_kernel_row(const ConvLayer<Scalar>& layer, std::size_t ky) {
    const std::size_t D = layer.kernel;
    const std::size_t C = layer.in_channels;
    Matrix<Scalar> packed(static_cast<Eigen::Index>(layer.out_channels), static_cast<Eigen::Index>(D * C));
    for (std::size_t o = 0; o < layer.out_channels; ++o) {
        for (std::size_t c = 0; c < C; ++c) {
            for (std::size_t kx = 0; kx < D; ++kx) {
                packed(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(kx * C + c)) = layer.weight(o, c, ky, kx);
            }
        }
    }
    return packed;
}

/// Same-size cross-correlation without bias or activation.
template <typename Scalar>
FeatureMaps<Scalar> correlate(const FeatureMaps<Scalar>& input, const ConvLayer<Scalar>& layer) {
    auto& scratch = workspace<Scalar>();
    const std::size_t D = layer.kernel;
    const std::size_t padded_width = input.width + 2 * (D / 2);
    const auto outputs = static_cast<Eigen::Index>(layer.out_channels);
    const auto wide_columns = static_cast<Eigen::Index>(input.height * padded_width);
    pad_input(input, D, scratch.padded);
    scratch.wide.resize(static_cast<std::size_t>(outputs * wide_columns));
    MatrixMap<Scalar> wide(scratch.wide.data(), outputs, wide_columns);
    wide.setZero();
    for (std::size_t ky = 0; ky < D; ++ky) {
        wide.noalias() += pack_kernel_row(layer, ky) *
                          kernel_row_view(scratch.padded, ky, input.height, padded_width, input.channels, D);
    }
    FeatureMaps<Scalar> out(input.height, input.width, layer.out_channels);
    const std::size_t run = input.width * layer.out_channels;
    for (std::size_t y = 0; y < input.height; ++y) {
        std::copy_n(scratch.wide.data() + y * padded_width * layer.out_channels, run, out.values.data() + y * run);
    }
    return out;
}

/// Layer whose correlation with an output gradient yields the input gradient: channels swapped
/// and the kernel rotated by 180 degrees.
template <typename Scalar>
ConvLayer<Scalar> adjoint_layer(const ConvLayer<Scalar>& layer) {
    const std::size_t D = layer.kernel;
    ConvLayer<Scalar> adjoint(layer.out_channels, layer.in_channels, D, false);
    for (std::size_t o = 0; o < layer.out_channels; ++o) {
        for (std::size_t c = 0; c < layer.in_channels; ++c) {
            for (std::size_t ky = 0; ky < D; ++ky) {
                for (std::size_t kx = 0; kx < D; ++kx) {
                    adjoint.weight(c, o, D - 1 - ky, D - 1 - kx) = layer.weight(o, c, ky, kx);
                }
            }
        }
    }
    return adjoint;
}

/// Adds the weight gradient sum_pixels delta (x) input-patch into `out` ([out][in][ky][kx]).
template <typename Scalar>
void accumulate_weight_gradient(const FeatureMaps<Scalar>& layer_input, const FeatureMaps<Scalar>& delta,
                                const ConvLayer<Scalar>& layer, std::vector<Scalar>& out) {
    auto& scratch = workspace<Scalar>();
    const std::size_t D = layer.kernel;
    const std::size_t C = layer.in_channels;
    const std::size_t padded_width = layer_input.width + 2 * (D / 2);
    const auto outputs = static_cast<Eigen::Index>(layer.out_channels);
    const auto wide_columns = static_cast<Eigen::Index>(layer_input.height * padded_width);
    pad_input(layer_input, D, scratch.padded);
    // Output gradient on the wide grid with zeros in the junk columns.
    scratch.wide.assign(static_cast<std::size_t>(outputs * wide_columns), Scalar(0));
    const std::size_t run = layer_input.width * layer.out_channels;
    for (std::size_t y = 0; y < layer_input.height; ++y) {
        std::copy_n(delta.values.data() + y * run, run, scratch.wide.data() + y * padded_width * layer.out_channels);
    }
    const MatrixMap<Scalar> wide(scratch.wide.data(), outputs, wide_columns);
    for (std::size_t ky = 0; ky < D; ++ky) {
        const Matrix<Scalar> grad =
            wide * kernel_row_view(scratch.padded, ky, layer_input.height, padded_width, C, D).transpose();
        for (std::size_t o = 0; o < layer.out_channels; ++o) {
            for (std::size_t c = 0; c < C; ++c) {
                for (std::size_t kx = 0; kx < D; ++kx) {
                    out[((o * C + c) * D + ky) * D + kx] +=
                        grad(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(kx * C + c));
                }
            }
        }
    }
}

/// Loss 0.5 * ||prediction - label||^2 of one sample; adds scale * its gradient into `out`.
template <typename Scalar>
double sample_gradient(const Network<Scalar>& net, const FeatureMaps<Scalar>& input, const FeatureMaps<Scalar>& label,
                       Scalar scale, Gradients<Scalar>& out) {
    const auto trace = forward_trace(net, input);
    const auto& prediction = trace.back();
    require(label.height == prediction.height && label.width == prediction.width && label.channels == 1,
            "label shape does not match network output");

    FeatureMaps<Scalar> delta(prediction.height, prediction.width, 1);
    double loss = 0.0;
    for (std::size_t i = 0; i < delta.values.size(); ++i) {
        const Scalar residual = prediction.values[i] - label.values[i];
        loss += 0.5 * static_cast<double>(residual) * static_cast<double>(residual);
        delta.values[i] = scale * residual;
    }

    for (std::size_t l = net.layers.size(); l-- > 0;) {
        const auto& layer = net.layers[l];
        const auto& layer_input = trace[l];
        const auto& layer_output = trace[l + 1];
        if (layer.relu) {
            // Subgradient 0 at 0: ReLU outputs exactly 0 there.
            for (std::size_t i = 0; i < delta.values.size(); ++i) {
                if (!(layer_output.values[i] > Scalar(0))) delta.values[i] = Scalar(0);
            }
        }
        accumulate_weight_gradient(layer_input, delta, layer, out.weights[l]);
        for (std::size_t p = 0; p < layer_input.height * layer_input.width; ++p) {
            for (std::size_t o = 0; o < layer.out_channels; ++o) {
                out.bias[l][o] += delta.values[p * layer.out_channels + o];
            }
        }
        if (l == 0) break;
        delta = correlate(delta, adjoint_layer(layer));
    }
    return loss;
}

}  // namespace

template <typename Scalar>
FeatureMaps<Scalar> to_feature_maps(const TFImage& image) {
    FeatureMaps<Scalar> maps(static_cast<std::size_t>(image.rows()), static_cast<std::size_t>(image.cols()), 1);
    for (Eigen::Index r = 0; r < image.rows(); ++r) {
        for (Eigen::Index c = 0; c < image.cols(); ++c) {
            maps.values[static_cast<std::size_t>(r * image.cols() + c)] = static_cast<Scalar>(image(r, c));
        }
    }
    return maps;
}

template <typename Scalar>
TFImage to_image(const FeatureMaps<Scalar>& maps) {
    require(maps.channels == 1, "only single-channel maps convert to images");
    TFImage image(static_cast<Eigen::Index>(maps.height), static_cast<Eigen::Index>(maps.width));
    for (Eigen::Index r = 0; r < image.rows(); ++r) {
        for (Eigen::Index c = 0; c < image.cols(); ++c) {
            image(r, c) = static_cast<double>(maps.values[static_cast<std::size_t>(r * image.cols() + c)]);
        }
    }
    return image;
}

template <typename Scalar>
void ConvLayer<Scalar>::validate() const {
    require(kernel % 2 == 1, "convolution kernel size must be odd");
    require(in_channels > 0 && out_channels > 0, "channel counts must be positive");
    require(weights.size() == out_channels * in_channels * kernel * kernel, "weight buffer has the wrong size");
    require(bias.size() == out_channels, "bias buffer has the wrong size");
}

template <typename Scalar>
void Network<Scalar>::validate() const {
    require(layers.size() >= 2, "network needs at least two layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        layer.validate();
        const bool last = l + 1 == layers.size();
        require(l != 0 || layer.in_channels == 1, "first layer must take one input channel");
        require(!last || (layer.out_channels == 1 && !layer.relu), "last layer must be a single linear output");
        require(last || layer.relu, "hidden layers must apply ReLU");
        if (l > 0) require(layer.in_channels == layers[l - 1].out_channels, "layer channel counts do not chain");
    }
}

template <typename Scalar>
std::size_t Network<Scalar>::parameter_count() const {
    std::size_t total = 0;
    for (const auto& layer : layers) total += layer.weights.size() + layer.bias.size();
    return total;
}

template <typename Scalar>
template <typename Other>
Network<Other> Network<Scalar>::cast() const {
    Network<Other> out;
    out.info = info;
    for (const auto& layer : layers) {
        ConvLayer<Other> converted(layer.in_channels, layer.out_channels, layer.kernel, layer.relu);
        std::transform(layer.weights.begin(), layer.weights.end(), converted.weights.begin(),
                       [](Scalar v) { return static_cast<Other>(v); });
        std::transform(layer.bias.begin(), layer.bias.end(), converted.bias.begin(),
                       [](Scalar v) { return static_cast<Other>(v); });
        out.layers.push_back(std::move(converted));
    }
    return out;
}

template <typename Scalar>
Network<Scalar> init_weights(std::size_t depth, std::size_t channels, std::size_t kernel, std::uint64_t seed) {
    if (depth < 2) throw ShapeError("network depth must be at least 2");
    Network<Scalar> net;
    net.info.depth = depth;
    net.info.channels = channels;
    net.info.kernel = kernel;
    net.info.init_seed = seed;
    Rng rng(seed);
    for (std::size_t l = 0; l < depth; ++l) {
        const bool last = l + 1 == depth;
        ConvLayer<Scalar> layer(l == 0 ? 1 : channels, last ? 1 : channels, kernel, !last);
        const double stddev = std::sqrt(2.0 / static_cast<double>(layer.in_channels * kernel * kernel));
        for (auto& w : layer.weights) w = static_cast<Scalar>(stddev * rng.normal());
        net.layers.push_back(std::move(layer));
    }
    net.validate();
    return net;
}

template <typename Scalar>
FeatureMaps<Scalar> conv_forward(const FeatureMaps<Scalar>& input, const ConvLayer<Scalar>& layer) {
    layer.validate();
    require(input.height >= 1 && input.width >= 1, "input feature maps are empty");
    require(input.channels == layer.in_channels,
            "input has " + std::to_string(input.channels) + " channels, layer expects " +
                std::to_string(layer.in_channels));
    require(input.values.size() == input.height * input.width * input.channels, "input buffer has the wrong size");
    FeatureMaps<Scalar> out = correlate(input, layer);
    MatrixMap<Scalar> out_matrix(out.values.data(), static_cast<Eigen::Index>(layer.out_channels),
                                 static_cast<Eigen::Index>(input.height * input.width));
    const Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> bias(
        layer.bias.data(), static_cast<Eigen::Index>(layer.out_channels));
    out_matrix.colwise() += bias;
    if (layer.relu) out_matrix = out_matrix.cwiseMax(Scalar(0));
    return out;
}

template <typename Scalar>
std::vector<FeatureMaps<Scalar>> forward_trace(const Network<Scalar>& net, const FeatureMaps<Scalar>& input) {
    std::vector<FeatureMaps<Scalar>> trace;
    trace.reserve(net.layers.size() + 1);
    trace.push_back(input);
    for (const auto& layer : net.layers) {
        trace.push_back(conv_forward(trace.back(), layer));
        require(trace.back().height == input.height && trace.back().width == input.width,
                "layer changed the feature map size");
    }
    return trace;
}

template <typename Scalar>
FeatureMaps<Scalar> forward(const Network<Scalar>& net, const FeatureMaps<Scalar>& input) {
    FeatureMaps<Scalar> current = input;
    for (const auto& layer : net.layers) current = conv_forward(current, layer);
    return current;
}

template <typename Scalar>
TFImage forward(const Network<Scalar>& net, const TFImage& input) {
    return to_image(forward(net, to_feature_maps<Scalar>(input)));
}

double mse_loss(std::span<const TFImage> predictions, std::span<const TFImage> labels) {
    if (predictions.empty()) throw std::invalid_argument("mse_loss needs at least one prediction");
    if (predictions.size() != labels.size()) throw std::invalid_argument("prediction and label counts differ");
    double total = 0.0;
    for (std::size_t m = 0; m < predictions.size(); ++m) {
        if (predictions[m].rows() != labels[m].rows() || predictions[m].cols() != labels[m].cols()) {
            throw ShapeError("prediction and label shapes differ");
        }
        total += (predictions[m] - labels[m]).squaredNorm();
    }
    return total / (2.0 * static_cast<double>(predictions.size()));
}

template <typename Scalar>
Gradients<Scalar> Gradients<Scalar>::zeros_like(const Network<Scalar>& net) {
    Gradients out;
    for (const auto& layer : net.layers) {
        out.weights.emplace_back(layer.weights.size(), Scalar(0));
        out.bias.emplace_back(layer.bias.size(), Scalar(0));
    }
    return out;
}

template <typename Scalar>
void Gradients<Scalar>::add(const Gradients& other) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (std::size_t i = 0; i < weights[l].size(); ++i) weights[l][i] += other.weights[l][i];
        for (std::size_t i = 0; i < bias[l].size(); ++i) bias[l][i] += other.bias[l][i];
    }
}

template <typename Scalar>
BatchGradient<Scalar> backward(const Network<Scalar>& net, std::span<const FeatureMaps<Scalar>> inputs,
                               std::span<const FeatureMaps<Scalar>> labels) {
    if (inputs.empty()) throw std::invalid_argument("backward needs a nonempty batch");
    if (inputs.size() != labels.size()) throw std::invalid_argument("input and label counts differ");
    const std::size_t batch = inputs.size();
    const Scalar scale = Scalar(1) / static_cast<Scalar>(batch);

    std::vector<Gradients<Scalar>> per_sample(batch);
    std::vector<double> losses(batch, 0.0);
    parallel_for(batch, [&](std::size_t m) {
        per_sample[m] = Gradients<Scalar>::zeros_like(net);
        losses[m] = sample_gradient(net, inputs[m], labels[m], scale, per_sample[m]);
    });

    BatchGradient<Scalar> result{0.0, std::move(per_sample[0])};
    double loss = losses[0];
    for (std::size_t m = 1; m < batch; ++m) {
        result.gradients.add(per_sample[m]);
        loss += losses[m];
    }
    result.loss = loss / static_cast<double>(batch);
    return result;
}

#define TFNET_INSTANTIATE(Scalar)                                                                                    \
    template struct ConvLayer<Scalar>;                                                                               \
    template struct Network<Scalar>;                                                                                 \
    template struct Gradients<Scalar>;                                                                               \
    template FeatureMaps<Scalar> to_feature_maps<Scalar>(const TFImage&);                                            \
    template TFImage to_image<Scalar>(const FeatureMaps<Scalar>&);                                                   \
    template Network<Scalar> init_weights<Scalar>(std::size_t, std::size_t, std::size_t, std::uint64_t);             \
    template FeatureMaps<Scalar> conv_forward<Scalar>(const FeatureMaps<Scalar>&, const ConvLayer<Scalar>&);         \
    template std::vector<FeatureMaps<Scalar>> forward_trace<Scalar>(const Network<Scalar>&,                          \
                                                                    const FeatureMaps<Scalar>&);                     \
    template FeatureMaps<Scalar> forward<Scalar>(const Network<Scalar>&, const FeatureMaps<Scalar>&);                \
    template TFImage forward<Scalar>(const Network<Scalar>&, const TFImage&);                                        \
    template BatchGradient<Scalar> backward<Scalar>(const Network<Scalar>&, std::span<const FeatureMaps<Scalar>>,    \
                                                    std::span<const FeatureMaps<Scalar>>);

TFNET_INSTANTIATE(float)
TFNET_INSTANTIATE(double)
#undef TFNET_INSTANTIATE

template Network<double> Network<float>::cast<double>() const;
template Network<float> Network<double>::cast<float>() const;
template Network<float> Network<float>::cast<float>() const;
template Network<double> Network<double>::cast<double>() const;

}  // namespace tfnet
