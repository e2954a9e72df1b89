#include "tfnet/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace tfnet {

template <typename Scalar>
void adam_step(std::span<const std::span<Scalar>> params, std::span<const std::span<const Scalar>> grads,
               AdamState<Scalar>& state) {
    if (params.size() != grads.size()) throw std::invalid_argument("adam_step: parameter/gradient count mismatch");
    if (state.first_moment.empty()) {
        for (const auto& p : params) {
            state.first_moment.emplace_back(p.size(), Scalar(0));
            state.second_moment.emplace_back(p.size(), Scalar(0));
        }
    }
    if (state.first_moment.size() != params.size()) throw std::invalid_argument("adam_step: state does not match");

    ++state.step;
    const auto& h = state.hyper;
    const double t = static_cast<double>(state.step);
    const double first_correction = 1.0 - std::pow(h.beta1, t);
    const double second_correction = 1.0 - std::pow(h.beta2, t);

    for (std::size_t k = 0; k < params.size(); ++k) {
        auto param = params[k];
        auto grad = grads[k];
        auto& m = state.first_moment[k];
        auto& v = state.second_moment[k];
        if (grad.size() != param.size() || m.size() != param.size()) {
            throw std::invalid_argument("adam_step: tensor shape mismatch");
        }
        for (std::size_t i = 0; i < param.size(); ++i) {
            const double g = grad[i];
            const double m_new = h.beta1 * m[i] + (1.0 - h.beta1) * g;
            const double v_new = h.beta2 * v[i] + (1.0 - h.beta2) * g * g;
            m[i] = static_cast<Scalar>(m_new);
            v[i] = static_cast<Scalar>(v_new);
            const double m_hat = m_new / first_correction;
            const double v_hat = v_new / second_correction;
            param[i] = static_cast<Scalar>(param[i] - h.learning_rate * m_hat / (std::sqrt(v_hat) + h.epsilon));
        }
    }
}

template <typename Scalar>
void adam_step(Network<Scalar>& net, const Gradients<Scalar>& grads, AdamState<Scalar>& state) {
    std::vector<std::span<Scalar>> params;
    std::vector<std::span<const Scalar>> views;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        params.emplace_back(net.layers[l].weights);
        views.emplace_back(grads.weights.at(l));
        params.emplace_back(net.layers[l].bias);
        views.emplace_back(grads.bias.at(l));
    }
    adam_step<Scalar>(std::span<const std::span<Scalar>>(params), std::span<const std::span<const Scalar>>(views),
                      state);
}

template void adam_step<float>(std::span<const std::span<float>>, std::span<const std::span<const float>>,
                               AdamState<float>&);
template void adam_step<double>(std::span<const std::span<double>>, std::span<const std::span<const double>>,
                                AdamState<double>&);
template void adam_step<float>(Network<float>&, const Gradients<float>&, AdamState<float>&);
template void adam_step<double>(Network<double>&, const Gradients<double>&, AdamState<double>&);

}  // namespace tfnet
