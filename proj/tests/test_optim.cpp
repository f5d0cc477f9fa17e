#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "core/optim.hpp"
#include "oracles.hpp"

using namespace ict;
using namespace ict::testing;

namespace {

Network scalar_net(double w) {
    Network net;
    Layer l;
    l.weights = Matrix(1, 1);
    l.weights(0, 0) = w;
    l.bias.assign(1, 0.0);
    l.activation = Activation::Identity;
    net.layers.push_back(std::move(l));
    return net;
}

GradientSet scalar_grad(const Network& net, double g) {
    GradientSet grads = GradientSet::zeros_like(net);
    grads.layers[0].weights(0, 0) = g;
    return grads;
}

} // namespace

TEST_CASE("cosine_lr endpoints and monotonicity") {
    CHECK(cosine_lr(0, 100, 0.1) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(cosine_lr(100, 100, 0.1) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(cosine_lr(50, 100, 0.1) == doctest::Approx(0.05).epsilon(1e-15));
    double prev = cosine_lr(0, 1000, 0.1);
    for (std::uint64_t t = 1; t <= 1000; ++t) {
        double lr = cosine_lr(t, 1000, 0.1);
        CHECK(lr <= prev);
        CHECK(lr >= 0.0);
        CHECK(lr <= 0.1);
        prev = lr;
    }
    CHECK_THROWS_AS(cosine_lr(0, 0, 0.1), std::invalid_argument);
}

TEST_CASE("sgd_step: vanilla reduction with zero momentum") {
    Network net = scalar_net(1.0);
    SgdState state = SgdState::for_network(net, 0.0, 0.1, 0.0, 10);
    sgd_step(net, scalar_grad(net, 2.0), state);
    CHECK(net.layers[0].weights(0, 0) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(state.step == 1);
}

TEST_CASE("sgd_step: zero gradient leaves parameters unchanged") {
    Network net = scalar_net(3.25);
    SgdState state = SgdState::for_network(net, 0.9, 0.1, 0.0, 10);
    for (int i = 0; i < 5; ++i) sgd_step(net, scalar_grad(net, 0.0), state);
    CHECK(net.layers[0].weights(0, 0) == 3.25);
}

TEST_CASE("sgd_step: Nesterov recurrence matches hand-stepped updates") {
    const double mu = 0.9, lr0 = 0.1, g1 = 2.0, g2 = -1.0;
    Network net = scalar_net(1.0);
    // Large total so the cosine factor is effectively constant per step; we
    // still recompute it exactly for the reference trace.
    SgdState state = SgdState::for_network(net, mu, lr0, 0.0, 100);

    double theta = 1.0, v = 0.0;
    auto reference_step = [&](double g, std::uint64_t t) {
        double lr = cosine_lr(t, 100, lr0);
        v = mu * v - lr * g;
        theta = theta + mu * v - lr * g;
    };
    sgd_step(net, scalar_grad(net, g1), state);
    reference_step(g1, 0);
    CHECK(net.layers[0].weights(0, 0) == doctest::Approx(theta).epsilon(1e-15));
    sgd_step(net, scalar_grad(net, g2), state);
    reference_step(g2, 1);
    CHECK(net.layers[0].weights(0, 0) == doctest::Approx(theta).epsilon(1e-15));
}

TEST_CASE("sgd_step: L2 couples into the gradient") {
    Network net = scalar_net(2.0);
    SgdState state = SgdState::for_network(net, 0.0, 0.1, 0.5, 10);
    sgd_step(net, scalar_grad(net, 0.0), state);
    // g_eff = 0 + 0.5*2 = 1; theta = 2 - 0.1*1 = 1.9
    CHECK(net.layers[0].weights(0, 0) == doctest::Approx(1.9).epsilon(1e-15));
}

TEST_CASE("sgd_step: non-finite gradient is rejected naming the layer") {
    Network net = make_mlp(2, 2, 4, 2, 1);
    SgdState state = SgdState::for_network(net, 0.9, 0.1, 0.0, 10);
    GradientSet grads = GradientSet::zeros_like(net);
    grads.layers[1].weights(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(sgd_step(net, grads, state), doctest::Contains("layer 1"),
                         std::runtime_error);
}

TEST_CASE("ema_update: decay endpoints") {
    Network student = make_mlp(2, 1, 4, 2, 7);
    Network start = make_mlp(2, 1, 4, 2, 8);

    EmaTeacher copy{start, 0.0};
    ema_update(copy, student);
    CHECK(nets_identical(copy.params, student));

    EmaTeacher frozen{start, 1.0};
    ema_update(frozen, student);
    CHECK(nets_identical(frozen.params, start));
}

TEST_CASE("ema_update: convex combination stays in the spanned interval") {
    std::mt19937_64 rng(13);
    Network student = make_mlp(3, 2, 5, 2, 100);
    Network init = make_mlp(3, 2, 5, 2, 200);
    EmaTeacher teacher{init, 0.7};
    Network before = teacher.params;
    ema_update(teacher, student);
    for (std::size_t l = 0; l < student.layers.size(); ++l) {
        for (std::size_t i = 0; i < student.layers[l].weights.data.size(); ++i) {
            double lo = std::min(before.layers[l].weights.data[i],
                                 student.layers[l].weights.data[i]);
            double hi = std::max(before.layers[l].weights.data[i],
                                 student.layers[l].weights.data[i]);
            double v = teacher.params.layers[l].weights.data[i];
            CHECK(v >= lo - 1e-15);
            CHECK(v <= hi + 1e-15);
        }
    }
}

TEST_CASE("ema_update: geometric gap decay with a constant student") {
    Network student = scalar_net(2.0);
    EmaTeacher teacher{scalar_net(5.0), 0.999};
    double gap = 3.0;
    for (int k = 0; k < 100; ++k) {
        ema_update(teacher, student);
        gap *= 0.999;
        double actual = teacher.params.layers[0].weights(0, 0) - 2.0;
        CHECK(std::abs(actual - gap) / gap < 1e-12 * (k + 1));
    }
}
