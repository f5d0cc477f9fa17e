#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace ict {

enum class Activation { ReLU, Identity };

struct Layer {
    Matrix weights;              // out x in
    std::vector<double> bias;    // out
    Activation activation = Activation::ReLU;

    std::size_t in_dim() const { return weights.cols; }
    std::size_t out_dim() const { return weights.rows; }
};

/// Feed-forward classifier: a stack of affine+activation layers followed by
/// a softmax head over the last layer's outputs.
struct Network {
    std::vector<Layer> layers;

    std::size_t input_dim() const { return layers.front().in_dim(); }
    std::size_t num_classes() const { return layers.back().out_dim(); }

    /// Pre-softmax logits for a batch (one sample per row).
    Matrix forward_logits(const Matrix& x) const;

    /// Class probabilities; each output row sums to 1.
    Matrix forward(const Matrix& x) const;

    std::size_t parameter_count() const;
};

/// Per-layer gradients, shape-congruent with the owning Network.
struct GradientSet {
    struct LayerGrad {
        Matrix weights;
        std::vector<double> bias;
    };
    std::vector<LayerGrad> layers;

    static GradientSet zeros_like(const Network& net);
    void scale_add(const GradientSet& other, double factor);
    bool all_finite() const;
};

enum class LossKind { CrossEntropy, Mse };

/// MLP with `hidden_layers` hidden ReLU layers of `hidden_units` each and a
/// linear class head. He-uniform weights (+-sqrt(6/fan_in)), zero biases.
Network make_mlp(std::size_t input_dim, std::size_t hidden_layers, std::size_t hidden_units,
                 std::size_t num_classes, std::uint64_t seed);

/// Row-wise softmax with max subtraction.
Matrix softmax(const Matrix& logits);

/// Mean over rows of -sum_c target*log(pred), log clamped at log(1e-12).
double cross_entropy(const Matrix& pred, const Matrix& target);

/// Mean over rows of squared distance divided by the number of columns.
double mse(const Matrix& pred, const Matrix& target);

/// Loss and analytic parameter gradients for the given loss measured on the
/// post-softmax probabilities. Targets are treated as constants.
struct BackwardResult {
    double loss = 0.0;
    GradientSet grads;
};
BackwardResult backward(const Network& net, const Matrix& x, const Matrix& target, LossKind kind);

/// Text checkpoint, 17 significant digits; round-trips bit-exactly.
void save_checkpoint(const Network& net, const std::string& path);
Network load_checkpoint(const std::string& path);
void write_checkpoint(const Network& net, std::ostream& out);
Network read_checkpoint(std::istream& in);

/// FNV-1a over the raw parameter bytes; used to assert read-only evaluation.
std::uint64_t parameter_hash(const Network& net);

} // namespace ict
