#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "doctest.h"

#include "core/data.hpp"

using namespace ict;

TEST_CASE("two_moons: noiseless geometry and class balance") {
    Dataset ds = two_moons(200, 0.0, 1);
    REQUIRE(ds.size() == 200);
    REQUIRE(ds.dim() == 2);
    // First upper point is phi=0 -> (1, 0); lower midpoint is (1, -0.5).
    CHECK(ds.inputs(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ds.inputs(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ds.labels[0] == 0);
    // All points satisfy the generator closed form.
    int count0 = 0, count1 = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        double x = ds.inputs(i, 0), y = ds.inputs(i, 1);
        if (ds.labels[i] == 0) {
            CHECK(std::abs(x * x + y * y - 1.0) < 1e-12);
            ++count0;
        } else {
            double dx = x - 1.0, dy = y - 0.5;
            CHECK(std::abs(dx * dx + dy * dy - 1.0) < 1e-12);
            ++count1;
        }
    }
    CHECK(std::abs(count0 - count1) <= 1);

    // phi = pi/2 on the lower moon -> (1, -0.5); lower arc has 100 points so
    // its midpoint is not exactly pi/2, check via a 3-point lower moon.
    Dataset tiny = two_moons(6, 0.0, 1);
    CHECK(tiny.inputs(4, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tiny.inputs(4, 1) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(tiny.labels[4] == 1);

    CHECK(dataset_fingerprint(two_moons(50, 0.1, 9)) == dataset_fingerprint(two_moons(50, 0.1, 9)));
    CHECK(dataset_fingerprint(two_moons(50, 0.1, 9)) != dataset_fingerprint(two_moons(50, 0.1, 10)));
    CHECK_THROWS_AS(two_moons(1, 0.1, 1), std::invalid_argument);
}

TEST_CASE("gaussian_clusters: centers, classes and CLT bound") {
    std::vector<std::vector<double>> centers = {{0, 0}, {5, 0}, {0, 5}, {5, 5}};
    std::vector<int> classes = {0, 1, 1, 0};  // different clusters, same class
    const std::size_t per = 400;
    const double sd = 0.3;
    Dataset ds = gaussian_clusters(centers, per, sd, classes, 3);
    REQUIRE(ds.size() == 4 * per);
    CHECK(ds.class_count == 2);
    for (std::size_t c = 0; c < centers.size(); ++c) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < per; ++i) {
            mx += ds.inputs(c * per + i, 0);
            my += ds.inputs(c * per + i, 1);
            CHECK(ds.labels[c * per + i] == classes[c]);
        }
        mx /= per;
        my /= per;
        double bound = 3.0 * sd / std::sqrt(static_cast<double>(per));
        CHECK(std::abs(mx - centers[c][0]) < bound);
        CHECK(std::abs(my - centers[c][1]) < bound);
    }

    // sd -> 0 puts every point at its center
    Dataset sharp = gaussian_clusters({{1, 1}, {2, 2}}, 5, 0.0, {0, 1}, 1);
    CHECK(sharp.inputs(0, 0) == 1.0);
    CHECK(sharp.inputs(9, 1) == 2.0);

    CHECK_THROWS_AS(gaussian_clusters({{0, 0}}, 5, 1.0, {0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_clusters(centers, 5, 1.0, {0, 1}, 1), std::invalid_argument);
}

TEST_CASE("split: stratification, disjointness and partition property") {
    Dataset ds = two_moons(400, 0.1, 21);
    SplitSpec spec;
    spec.labels_per_class = 3;
    spec.unlabeled_count = 200;
    spec.validation_count = 50;
    spec.test_count = 100;
    spec.include_labeled_in_unlabeled = false;
    spec.seed = 8;
    Splits parts = split(ds, spec);

    REQUIRE(parts.labeled.size() == 6);
    int per_class[2] = {0, 0};
    for (int lab : parts.labeled.labels) ++per_class[lab];
    CHECK(per_class[0] == 3);
    CHECK(per_class[1] == 3);
    CHECK_FALSE(parts.unlabeled.has_labels());

    // Row identity via coordinates (all rows in the source are distinct).
    auto key = [](const Matrix& m, std::size_t i) {
        return std::pair<double, double>(m(i, 0), m(i, 1));
    };
    std::set<std::pair<double, double>> seen;
    std::size_t total = 0;
    for (const Dataset* part :
         {&parts.labeled, &parts.unlabeled, &parts.validation, &parts.test}) {
        for (std::size_t i = 0; i < part->size(); ++i) {
            CHECK(seen.insert(key(part->inputs, i)).second);  // covered exactly once
            ++total;
        }
    }
    CHECK(total == 6 + 200 + 50 + 100);

    // include flag appends the labeled inputs to the unlabeled pool
    spec.include_labeled_in_unlabeled = true;
    Splits with = split(ds, spec);
    CHECK(with.unlabeled.size() == 206);

    // determinism
    Splits again = split(ds, spec);
    CHECK(again.labeled.inputs.data == with.labeled.inputs.data);
    CHECK(again.unlabeled.inputs.data == with.unlabeled.inputs.data);

    // infeasible request names the shortfall
    spec.unlabeled_count = 10000;
    CHECK_THROWS_WITH_AS(split(ds, spec), doctest::Contains("short by"), std::invalid_argument);
}

TEST_CASE("standardize: self-application, degenerate dimension, no leakage") {
    Dataset ds = two_moons(500, 0.2, 31);
    Standardizer s = Standardizer::fit(ds);
    Dataset z = s.apply(ds);
    for (std::size_t j = 0; j < 2; ++j) {
        double mean = 0, var = 0;
        for (std::size_t i = 0; i < z.size(); ++i) mean += z.inputs(i, j);
        mean /= static_cast<double>(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            var += (z.inputs(i, j) - mean) * (z.inputs(i, j) - mean);
        }
        var /= static_cast<double>(z.size());
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-6);
    }

    // constant dimension: floored sd, zeros, no NaN
    Dataset flat;
    flat.inputs = Matrix(4, 2);
    for (std::size_t i = 0; i < 4; ++i) {
        flat.inputs(i, 0) = 7.0;
        flat.inputs(i, 1) = static_cast<double>(i);
    }
    Standardizer fs = Standardizer::fit(flat);
    Dataset fz = fs.apply(flat);
    REQUIRE(fz.inputs.all_finite());
    for (std::size_t i = 0; i < 4; ++i) CHECK(fz.inputs(i, 0) == 0.0);

    // test set standardized with train stats: finite, generally nonzero mean
    Dataset other = two_moons(100, 0.2, 77);
    Dataset zo = s.apply(other);
    CHECK(zo.inputs.all_finite());
}

TEST_CASE("csv: round-trip is exact; schema errors are reported") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "ict_test_csv";
    fs::create_directories(dir);
    std::string path = (dir / "moons.csv").string();

    Dataset ds = two_moons(37, 0.15, 5);
    save_csv(ds, path);
    Dataset back = ingest_csv(path);
    REQUIRE(back.size() == ds.size());
    CHECK(back.inputs.data == ds.inputs.data);  // 17 digits round-trips exactly
    CHECK(back.labels == ds.labels);
    CHECK(back.class_count == 2);

    // byte-identical regeneration
    std::string path2 = (dir / "moons2.csv").string();
    save_csv(two_moons(37, 0.15, 5), path2);
    std::ifstream f1(path), f2(path2);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);

    // unlabeled dataset with labels expected -> schema error
    Dataset unlabeled = ds;
    unlabeled.labels.clear();
    std::string upath = (dir / "unlabeled.csv").string();
    save_csv(unlabeled, upath);
    CHECK_THROWS_AS(ingest_csv(upath, 2), std::runtime_error);

    // malformed row names the line
    std::string bad = (dir / "bad.csv").string();
    {
        std::ofstream out(bad);
        out << "f0,f1,label\n1.0,2.0,0\nx,2.0,1\n";
    }
    CHECK_THROWS_WITH_AS(ingest_csv(bad), doctest::Contains("line 3"), std::runtime_error);

    // hand-written fixture
    std::string fixture = (dir / "fixture.csv").string();
    {
        std::ofstream out(fixture);
        out << "f0,f1,label\n";
        for (int i = 0; i < 6; ++i) out << i << "," << i * 0.5 << "," << i % 3 << "\n";
    }
    Dataset fx = ingest_csv(fixture, 3);
    CHECK(fx.size() == 6);
    CHECK(fx.class_count == 3);

    // label out of declared range
    CHECK_THROWS_AS(ingest_csv(fixture, 2), std::runtime_error);
    fs::remove_all(dir);
}

TEST_CASE("batches: permutation per pass, partial batch kept, independent streams") {
    BatchIterator it(10, 4, 99);
    std::vector<std::size_t> epoch;
    auto b1 = it.next(), b2 = it.next(), b3 = it.next();
    CHECK(b1.size() == 4);
    CHECK(b2.size() == 4);
    CHECK(b3.size() == 2);  // last partial batch kept
    for (auto* b : {&b1, &b2, &b3}) epoch.insert(epoch.end(), b->begin(), b->end());
    std::sort(epoch.begin(), epoch.end());
    for (std::size_t i = 0; i < 10; ++i) CHECK(epoch[i] == i);

    // batch_size >= n -> a single permuted batch
    BatchIterator whole(5, 100, 7);
    CHECK(whole.next().size() == 5);
    CHECK(whole.batches_per_pass() == 1);

    // differently seeded iterators pair rows differently
    BatchIterator a(100, 10, 1), b(100, 10, 2);
    CHECK(a.next() != b.next());

    // identical seeds replay identically
    BatchIterator c(100, 10, 1);
    CHECK(BatchIterator(100, 10, 1).next() == c.next());

    CHECK_THROWS_AS(BatchIterator(0, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(BatchIterator(4, 0, 1), std::invalid_argument);
}
