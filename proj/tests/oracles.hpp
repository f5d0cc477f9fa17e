// Test-only oracles, independent of the gradient path they check.
#pragma once

#include <cmath>
#include <limits>
#include <random>

#include "core/network.hpp"

namespace ict::testing {

inline double loss_value(const Network& net, const Matrix& x, const Matrix& target,
                         LossKind kind) {
    Matrix probs = net.forward(x);
    return kind == LossKind::CrossEntropy ? cross_entropy(probs, target) : mse(probs, target);
}

/// Central finite differences over every parameter, step h.
inline GradientSet finite_difference_gradients(Network net, const Matrix& x, const Matrix& target,
                                               LossKind kind, double h = 1e-5) {
    GradientSet fd = GradientSet::zeros_like(net);
    auto probe = [&](double& param) {
        double saved = param;
        param = saved + h;
        double up = loss_value(net, x, target, kind);
        param = saved - h;
        double down = loss_value(net, x, target, kind);
        param = saved;
        return (up - down) / (2.0 * h);
    };
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        for (std::size_t i = 0; i < net.layers[l].weights.data.size(); ++i) {
            fd.layers[l].weights.data[i] = probe(net.layers[l].weights.data[i]);
        }
        for (std::size_t i = 0; i < net.layers[l].bias.size(); ++i) {
            fd.layers[l].bias[i] = probe(net.layers[l].bias[i]);
        }
    }
    return fd;
}

/// Relative error with denominator max(|a|, |b|, 1e-8).
inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

/// Worst relative disagreement between two gradient sets.
inline double max_grad_rel_err(const GradientSet& a, const GradientSet& b) {
    double worst = 0.0;
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        for (std::size_t i = 0; i < a.layers[l].weights.data.size(); ++i) {
            worst = std::max(worst, rel_err(a.layers[l].weights.data[i],
                                            b.layers[l].weights.data[i]));
        }
        for (std::size_t i = 0; i < a.layers[l].bias.size(); ++i) {
            worst = std::max(worst, rel_err(a.layers[l].bias[i], b.layers[l].bias[i]));
        }
    }
    return worst;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                            double scale = 1.0) {
    std::normal_distribution<double> dist(0.0, scale);
    Matrix m(rows, cols);
    for (double& v : m.data) v = dist(rng);
    return m;
}

/// Random probability-vector targets (row-normalized positives).
inline Matrix random_prob_targets(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(0.05, 1.0);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        double sum = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            m(i, c) = dist(rng);
            sum += m(i, c);
        }
        for (std::size_t c = 0; c < cols; ++c) m(i, c) /= sum;
    }
    return m;
}

/// Smallest |pre-activation| over all ReLU units. Finite differences are
/// meaningless when a parameter bump flips a unit across the kink, so the
/// gradient tests resample until this margin comfortably exceeds the step.
inline double relu_margin(const Network& net, const Matrix& x) {
    double margin = std::numeric_limits<double>::infinity();
    Matrix h = x;
    for (const Layer& layer : net.layers) {
        std::size_t out = layer.weights.rows;
        Matrix z(h.rows, out);
        for (std::size_t r = 0; r < h.rows; ++r) {
            for (std::size_t o = 0; o < out; ++o) {
                double acc = layer.bias[o];
                for (std::size_t c = 0; c < h.cols; ++c) acc += h(r, c) * layer.weights(o, c);
                z(r, o) = acc;
            }
        }
        if (layer.activation == Activation::ReLU) {
            for (double v : z.data) margin = std::min(margin, std::abs(v));
            for (double& v : z.data) v = v > 0.0 ? v : 0.0;
        }
        h = z;
    }
    return margin;
}

inline bool nets_identical(const Network& a, const Network& b) {
    if (a.layers.size() != b.layers.size()) return false;
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        if (a.layers[l].weights.data != b.layers[l].weights.data) return false;
        if (a.layers[l].bias != b.layers[l].bias) return false;
    }
    return true;
}

} // namespace ict::testing
