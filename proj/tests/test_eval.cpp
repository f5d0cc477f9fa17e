#include <stdexcept>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

#include "core/eval.hpp"
#include "oracles.hpp"

using namespace ict;
using namespace ict::testing;

namespace {

// 1-input model whose class is decided by the sign of the input.
Network sign_model() {
    Network net;
    Layer l;
    l.weights = Matrix(2, 1);
    l.weights(0, 0) = -10.0;  // class 0 for negative inputs
    l.weights(1, 0) = 10.0;
    l.bias.assign(2, 0.0);
    l.activation = Activation::Identity;
    net.layers.push_back(std::move(l));
    return net;
}

Network zero_model(std::size_t in, std::size_t classes) {
    Network net;
    Layer l;
    l.weights = Matrix(classes, in);
    l.bias.assign(classes, 0.0);
    l.activation = Activation::Identity;
    net.layers.push_back(std::move(l));
    return net;
}

Dataset fixture_4pt() {
    Dataset ds;
    ds.inputs = Matrix(4, 1);
    ds.inputs.data = {-2.0, -1.0, 1.0, 2.0};
    ds.labels = {0, 0, 1, 0};  // one point deliberately mislabeled for the model
    ds.class_count = 2;
    return ds;
}

} // namespace

TEST_CASE("error_rate: fixtures and tie-breaking") {
    Dataset ds = fixture_4pt();
    CHECK(error_rate(sign_model(), ds) == doctest::Approx(25.0));

    Dataset perfect = ds;
    perfect.labels = {0, 0, 1, 1};
    CHECK(error_rate(sign_model(), perfect) == 0.0);

    // constant predictor ties -> argmax breaks toward class 0 -> 50% on a
    // balanced binary set
    CHECK(error_rate(zero_model(1, 2), perfect) == doctest::Approx(50.0));

    Dataset unlabeled = ds;
    unlabeled.labels.clear();
    CHECK_THROWS_AS(error_rate(sign_model(), unlabeled), std::invalid_argument);
}

TEST_CASE("error_rate: permutation invariance") {
    std::mt19937_64 rng(3);
    Network net = make_mlp(2, 2, 8, 2, 5);
    Dataset ds = two_moons(101, 0.2, 7);
    double base = error_rate(net, ds);

    std::vector<std::size_t> perm(ds.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    Dataset shuffled = ds;
    shuffled.inputs = gather_rows(ds.inputs, perm);
    for (std::size_t i = 0; i < perm.size(); ++i) shuffled.labels[i] = ds.labels[perm[i]];
    CHECK(error_rate(net, shuffled) == base);
}

TEST_CASE("aggregate_trials: closed forms and streaming recomputation") {
    TrialReport r = aggregate_trials({10, 10, 10});
    CHECK(r.mean == 10.0);
    CHECK(r.sd == 0.0);

    r = aggregate_trials({8, 10, 12});
    CHECK(r.mean == doctest::Approx(10.0));
    CHECK(r.sd == doctest::Approx(2.0));

    r = aggregate_trials({7.3});
    CHECK(r.mean == doctest::Approx(7.3));
    CHECK(r.sd == 0.0);

    // Welford recomputation as the independent route
    std::vector<double> xs = {3.5, 8.25, 1.0, 9.0, 4.75};
    r = aggregate_trials(xs);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double d = xs[i] - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (xs[i] - mean);
    }
    CHECK(std::abs(r.mean - mean) < 1e-12);
    CHECK(std::abs(r.sd - std::sqrt(m2 / static_cast<double>(xs.size() - 1))) < 1e-12);

    CHECK_THROWS_AS(aggregate_trials({}), std::invalid_argument);
}

TEST_CASE("export_boundary: uniform grid, row count, model untouched") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "ict_test_boundary";
    fs::create_directories(dir);
    std::string path = (dir / "grid.csv").string();

    Network net = zero_model(2, 2);
    std::uint64_t hash_before = parameter_hash(net);
    GridSpec spec;
    spec.res_x = 100;
    spec.res_y = 100;
    BoundaryGrid grid = export_boundary(net, spec, path);
    CHECK(parameter_hash(net) == hash_before);
    REQUIRE(grid.probs.rows == 10000);
    for (std::size_t i = 0; i < grid.probs.rows; ++i) {
        CHECK(grid.probs(i, 0) == doctest::Approx(0.5).epsilon(1e-12));
        double sum = grid.probs(i, 0) + grid.probs(i, 1);
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }

    std::ifstream in(path);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 10001);  // header + 100x100 cells

    Network non2d = zero_model(3, 2);
    CHECK_THROWS_AS(eval_boundary(non2d, spec), std::invalid_argument);
    fs::remove_all(dir);
}
