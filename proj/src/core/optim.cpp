#include "optim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ict {

double cosine_lr(std::uint64_t t, std::uint64_t total, double base_lr) {
    if (total == 0) throw std::invalid_argument("cosine_lr: total steps must be positive");
    if (t > total) throw std::invalid_argument("cosine_lr: step exceeds total");
    double frac = static_cast<double>(t) / static_cast<double>(total);
    return base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * frac));
}

SgdState SgdState::for_network(const Network& net, double momentum, double base_lr, double l2,
                               std::uint64_t total_steps) {
    SgdState state;
    state.velocity = GradientSet::zeros_like(net);
    state.momentum = momentum;
    state.base_lr = base_lr;
    state.l2 = l2;
    state.total_steps = total_steps;
    return state;
}

void sgd_step(Network& net, const GradientSet& grads, SgdState& state) {
    if (grads.layers.size() != net.layers.size()) {
        throw std::invalid_argument("sgd_step: gradient/network layer count mismatch");
    }
    for (std::size_t l = 0; l < grads.layers.size(); ++l) {
        if (!grads.layers[l].weights.all_finite()) {
            throw std::runtime_error("sgd_step: non-finite gradient in layer " + std::to_string(l));
        }
        for (double v : grads.layers[l].bias) {
            if (!std::isfinite(v)) {
                throw std::runtime_error("sgd_step: non-finite bias gradient in layer " +
                                         std::to_string(l));
            }
        }
    }
    const double lr = cosine_lr(state.step, state.total_steps, state.base_lr);
    const double mu = state.momentum;
    auto update = [&](double& theta, double& v, double g) {
        double g_eff = g + state.l2 * theta;
        v = mu * v - lr * g_eff;
        theta += mu * v - lr * g_eff;
    };
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Layer& layer = net.layers[l];
        auto& vel = state.velocity.layers[l];
        const auto& g = grads.layers[l];
        for (std::size_t i = 0; i < layer.weights.data.size(); ++i) {
            update(layer.weights.data[i], vel.weights.data[i], g.weights.data[i]);
        }
        for (std::size_t i = 0; i < layer.bias.size(); ++i) {
            update(layer.bias[i], vel.bias[i], g.bias[i]);
        }
    }
    ++state.step;
}

void ema_update(EmaTeacher& teacher, const Network& student) {
    if (teacher.params.layers.size() != student.layers.size()) {
        throw std::invalid_argument("ema_update: layer count mismatch");
    }
    const double d = teacher.decay;
    for (std::size_t l = 0; l < student.layers.size(); ++l) {
        Layer& tl = teacher.params.layers[l];
        const Layer& sl = student.layers[l];
        if (!tl.weights.same_shape(sl.weights) || tl.bias.size() != sl.bias.size()) {
            throw std::invalid_argument("ema_update: shape mismatch in layer " + std::to_string(l));
        }
        for (std::size_t i = 0; i < tl.weights.data.size(); ++i) {
            tl.weights.data[i] = d * tl.weights.data[i] + (1.0 - d) * sl.weights.data[i];
        }
        for (std::size_t i = 0; i < tl.bias.size(); ++i) {
            tl.bias[i] = d * tl.bias[i] + (1.0 - d) * sl.bias[i];
        }
    }
}

} // namespace ict
