#pragma once

#include <cstdint>

#include "network.hpp"

namespace ict {

/// Cosine-annealed learning rate: lr0 * 0.5 * (1 + cos(pi * t / total)).
/// Throws std::invalid_argument when total == 0 or t is out of range.
double cosine_lr(std::uint64_t t, std::uint64_t total, double base_lr);

/// SGD with Nesterov momentum and coupled L2 regularization.
struct SgdState {
    GradientSet velocity;
    double momentum = 0.9;
    double base_lr = 0.1;
    double l2 = 1e-4;
    std::uint64_t step = 0;
    std::uint64_t total_steps = 0;

    static SgdState for_network(const Network& net, double momentum, double base_lr, double l2,
                                std::uint64_t total_steps);
};

/// One Nesterov update. With effective gradient g~ = g + l2*theta and
/// lr = cosine_lr(step, total, lr0):
///   v     <- momentum*v - lr*g~
///   theta <- theta + momentum*v - lr*g~
/// Throws std::runtime_error naming the layer on non-finite gradients.
void sgd_step(Network& net, const GradientSet& grads, SgdState& state);

/// Mean-teacher parameter set, maintained as an EMA of the student.
struct EmaTeacher {
    Network params;
    double decay = 0.999;
};

/// theta' <- decay*theta' + (1-decay)*theta, element-wise.
void ema_update(EmaTeacher& teacher, const Network& student);

} // namespace ict
