#include "network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ict {

namespace {

constexpr double kLogClamp = 1e-12;

double apply_act(Activation act, double z) {
    return act == Activation::ReLU ? (z > 0.0 ? z : 0.0) : z;
}

double act_derivative(Activation act, double z) {
    return act == Activation::ReLU ? (z > 0.0 ? 1.0 : 0.0) : 1.0;
}

// Affine map of a batch: z = x * W^T + b.
Matrix affine(const Matrix& x, const Layer& layer) {
    if (x.cols != layer.in_dim()) {
        throw std::invalid_argument("network: input has " + std::to_string(x.cols) +
                                    " columns, layer expects " + std::to_string(layer.in_dim()));
    }
    Matrix z(x.rows, layer.out_dim());
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (std::size_t o = 0; o < layer.out_dim(); ++o) {
            double acc = layer.bias[o];
            const double* wrow = layer.weights.row(o);
            const double* xrow = x.row(i);
            for (std::size_t k = 0; k < layer.in_dim(); ++k) acc += wrow[k] * xrow[k];
            z(i, o) = acc;
        }
    }
    return z;
}

void check_prob_shapes(const Matrix& pred, const Matrix& target, const char* op) {
    if (!pred.same_shape(target)) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch");
    }
    if (pred.rows == 0) {
        throw std::invalid_argument(std::string(op) + ": empty batch");
    }
}

void format_value(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

} // namespace

Matrix Network::forward_logits(const Matrix& x) const {
    Matrix h = x;
    for (const Layer& layer : layers) {
        Matrix z = affine(h, layer);
        for (double& v : z.data) v = apply_act(layer.activation, v);
        h = std::move(z);
    }
    return h;
}

Matrix Network::forward(const Matrix& x) const {
    return softmax(forward_logits(x));
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers) n += l.weights.data.size() + l.bias.size();
    return n;
}

GradientSet GradientSet::zeros_like(const Network& net) {
    GradientSet g;
    g.layers.reserve(net.layers.size());
    for (const Layer& l : net.layers) {
        g.layers.push_back({Matrix(l.weights.rows, l.weights.cols),
                            std::vector<double>(l.bias.size(), 0.0)});
    }
    return g;
}

void GradientSet::scale_add(const GradientSet& other, double factor) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
        for (std::size_t i = 0; i < layers[l].weights.data.size(); ++i) {
            layers[l].weights.data[i] += factor * other.layers[l].weights.data[i];
        }
        for (std::size_t i = 0; i < layers[l].bias.size(); ++i) {
            layers[l].bias[i] += factor * other.layers[l].bias[i];
        }
    }
}

bool GradientSet::all_finite() const {
    for (const auto& l : layers) {
        if (!l.weights.all_finite()) return false;
        for (double v : l.bias) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

Network make_mlp(std::size_t input_dim, std::size_t hidden_layers, std::size_t hidden_units,
                 std::size_t num_classes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Network net;
    std::size_t in_dim = input_dim;
    auto add_layer = [&](std::size_t out_dim, Activation act) {
        Layer layer;
        layer.weights = Matrix(out_dim, in_dim);
        layer.bias.assign(out_dim, 0.0);
        layer.activation = act;
        double limit = std::sqrt(6.0 / static_cast<double>(in_dim));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (double& w : layer.weights.data) w = dist(rng);
        net.layers.push_back(std::move(layer));
        in_dim = out_dim;
    };
    for (std::size_t l = 0; l < hidden_layers; ++l) add_layer(hidden_units, Activation::ReLU);
    add_layer(num_classes, Activation::Identity);
    return net;
}

Matrix softmax(const Matrix& logits) {
    Matrix p(logits.rows, logits.cols);
    for (std::size_t i = 0; i < logits.rows; ++i) {
        const double* z = logits.row(i);
        double zmax = *std::max_element(z, z + logits.cols);
        double sum = 0.0;
        for (std::size_t c = 0; c < logits.cols; ++c) {
            double e = std::exp(z[c] - zmax);
            p(i, c) = e;
            sum += e;
        }
        for (std::size_t c = 0; c < logits.cols; ++c) p(i, c) /= sum;
    }
    return p;
}

double cross_entropy(const Matrix& pred, const Matrix& target) {
    check_prob_shapes(pred, target, "cross_entropy");
    double total = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        total -= target.data[i] * std::log(std::max(pred.data[i], kLogClamp));
    }
    return total / static_cast<double>(pred.rows);
}

double mse(const Matrix& pred, const Matrix& target) {
    check_prob_shapes(pred, target, "mse");
    double total = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        double d = pred.data[i] - target.data[i];
        total += d * d;
    }
    return total / static_cast<double>(pred.rows * pred.cols);
}

BackwardResult backward(const Network& net, const Matrix& x, const Matrix& target, LossKind kind) {
    const std::size_t depth = net.layers.size();
    std::vector<Matrix> pre(depth);          // pre-activation z per layer
    std::vector<Matrix> act(depth + 1);      // act[0] = x, act[l+1] = activation(z_l)
    act[0] = x;
    for (std::size_t l = 0; l < depth; ++l) {
        pre[l] = affine(act[l], net.layers[l]);
        act[l + 1] = pre[l];
        for (double& v : act[l + 1].data) v = apply_act(net.layers[l].activation, v);
    }
    Matrix probs = softmax(act[depth]);
    check_prob_shapes(probs, target, "backward");

    const double n = static_cast<double>(x.rows);
    BackwardResult result;
    result.grads = GradientSet::zeros_like(net);

    // delta = dLoss/d(logits), both losses measured on post-softmax probabilities.
    Matrix delta(probs.rows, probs.cols);
    if (kind == LossKind::CrossEntropy) {
        result.loss = cross_entropy(probs, target);
        for (std::size_t i = 0; i < delta.data.size(); ++i) {
            delta.data[i] = (probs.data[i] - target.data[i]) / n;
        }
    } else {
        result.loss = mse(probs, target);
        const double scale = 2.0 / static_cast<double>(probs.rows * probs.cols);
        for (std::size_t i = 0; i < probs.rows; ++i) {
            double dot = 0.0;
            for (std::size_t c = 0; c < probs.cols; ++c) {
                dot += scale * (probs(i, c) - target(i, c)) * probs(i, c);
            }
            for (std::size_t c = 0; c < probs.cols; ++c) {
                double g = scale * (probs(i, c) - target(i, c));
                delta(i, c) = probs(i, c) * (g - dot);
            }
        }
    }

    for (std::size_t li = depth; li-- > 0;) {
        const Layer& layer = net.layers[li];
        // delta currently holds dLoss/d(activation output of layer li) for the
        // top layer this is dLoss/d(logits); fold in the activation derivative.
        for (std::size_t i = 0; i < delta.data.size(); ++i) {
            delta.data[i] *= act_derivative(layer.activation, pre[li].data[i]);
        }
        auto& grad = result.grads.layers[li];
        for (std::size_t i = 0; i < delta.rows; ++i) {
            for (std::size_t o = 0; o < layer.out_dim(); ++o) {
                double d = delta(i, o);
                grad.bias[o] += d;
                const double* arow = act[li].row(i);
                double* grow = grad.weights.row(o);
                for (std::size_t k = 0; k < layer.in_dim(); ++k) grow[k] += d * arow[k];
            }
        }
        if (li > 0) {
            Matrix prev(delta.rows, layer.in_dim());
            for (std::size_t i = 0; i < delta.rows; ++i) {
                for (std::size_t k = 0; k < layer.in_dim(); ++k) {
                    double acc = 0.0;
                    for (std::size_t o = 0; o < layer.out_dim(); ++o) {
                        acc += delta(i, o) * layer.weights(o, k);
                    }
                    prev(i, k) = acc;
                }
            }
            delta = std::move(prev);
        }
    }
    return result;
}

void write_checkpoint(const Network& net, std::ostream& out) {
    std::string text = "ict-checkpoint v1\n";
    text += "layers " + std::to_string(net.layers.size()) + "\n";
    for (const Layer& l : net.layers) {
        text += "layer " + std::to_string(l.out_dim()) + " " + std::to_string(l.in_dim()) + " " +
                (l.activation == Activation::ReLU ? "relu" : "identity") + "\n";
        text += "w";
        for (double v : l.weights.data) {
            text += ' ';
            format_value(text, v);
        }
        text += "\nb";
        for (double v : l.bias) {
            text += ' ';
            format_value(text, v);
        }
        text += "\n";
    }
    out << text;
}

Network read_checkpoint(std::istream& in) {
    std::string header, version;
    in >> header >> version;
    if (header != "ict-checkpoint" || version != "v1") {
        throw std::runtime_error("checkpoint: unrecognized header");
    }
    std::string tag;
    std::size_t count = 0;
    in >> tag >> count;
    if (tag != "layers") throw std::runtime_error("checkpoint: missing layer count");
    Network net;
    for (std::size_t li = 0; li < count; ++li) {
        std::size_t out_dim = 0, in_dim = 0;
        std::string act;
        in >> tag >> out_dim >> in_dim >> act;
        if (tag != "layer") throw std::runtime_error("checkpoint: malformed layer header");
        Layer layer;
        layer.weights = Matrix(out_dim, in_dim);
        layer.bias.assign(out_dim, 0.0);
        layer.activation = act == "relu" ? Activation::ReLU : Activation::Identity;
        in >> tag;
        if (tag != "w") throw std::runtime_error("checkpoint: expected weights");
        for (double& v : layer.weights.data) in >> v;
        in >> tag;
        if (tag != "b") throw std::runtime_error("checkpoint: expected biases");
        for (double& v : layer.bias) in >> v;
        if (!in) throw std::runtime_error("checkpoint: truncated parameter data");
        net.layers.push_back(std::move(layer));
    }
    if (net.layers.empty()) throw std::runtime_error("checkpoint: no layers");
    return net;
}

void save_checkpoint(const Network& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
    write_checkpoint(net, out);
}

Network load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    return read_checkpoint(in);
}

std::uint64_t parameter_hash(const Network& net) {
    std::uint64_t h = 14695981039346656037ULL;
    auto mix_bytes = [&](const double* p, std::size_t n) {
        const unsigned char* bytes = reinterpret_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n * sizeof(double); ++i) {
            h ^= bytes[i];
            h *= 1099511628211ULL;
        }
    };
    for (const Layer& l : net.layers) {
        mix_bytes(l.weights.data.data(), l.weights.data.size());
        mix_bytes(l.bias.data(), l.bias.size());
    }
    return h;
}

} // namespace ict
