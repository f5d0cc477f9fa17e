#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace ict {

struct Dataset {
    Matrix inputs;                       // n x d
    std::vector<int> labels;             // empty when unlabeled
    int class_count = 0;
    std::string name;
    std::string provenance;              // generator parameters, source file, ...

    std::size_t size() const { return inputs.rows; }
    std::size_t dim() const { return inputs.cols; }
    bool has_labels() const { return !labels.empty(); }
};

/// 64-bit FNV-1a over inputs, labels and class count.
std::uint64_t dataset_fingerprint(const Dataset& ds);

/// Two interleaved half-circles with isotropic Gaussian noise.
/// Upper moon (label 0): (cos phi, sin phi); lower moon (label 1):
/// (1 - cos phi, 0.5 - sin phi), phi in [0, pi].
Dataset two_moons(std::size_t n, double noise_sd, std::uint64_t seed);

/// Isotropic Gaussian blobs with a per-cluster class assignment.
Dataset gaussian_clusters(const std::vector<std::vector<double>>& centers,
                          std::size_t per_cluster, double sd,
                          const std::vector<int>& class_of_cluster, std::uint64_t seed);

struct SplitSpec {
    std::size_t labels_per_class = 3;
    std::size_t unlabeled_count = 1000;
    std::size_t validation_count = 500;
    std::size_t test_count = 1000;
    bool include_labeled_in_unlabeled = true;
    std::uint64_t seed = 0;
};

struct Splits {
    Dataset labeled;
    Dataset unlabeled;   // labels stripped
    Dataset validation;
    Dataset test;
};

/// Stratified labeled split plus disjoint unlabeled/validation/test parts.
/// When include_labeled_in_unlabeled is set the labeled inputs are appended
/// to the unlabeled pool (without labels). Throws on infeasible requests,
/// listing the shortfall.
Splits split(const Dataset& ds, const SplitSpec& spec);

/// Per-dimension statistics of a dataset; sd floored at 1e-8.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> sd;

    static Standardizer fit(const Dataset& source);
    Dataset apply(const Dataset& ds) const;
};

/// CSV with header f0,...,f{d-1}[,label]. Values written with 17 significant
/// digits so a round-trip is exact.
void save_csv(const Dataset& ds, const std::string& path);
Dataset ingest_csv(const std::string& path, std::optional<int> expected_class_count = {});

/// Epoch-reshuffled minibatch index iterator. Each pass over the data uses a
/// permutation derived from (seed, pass); the last partial batch is kept.
class BatchIterator {
  public:
    BatchIterator(std::size_t n, std::size_t batch_size, std::uint64_t seed);

    /// Row indices of the next batch, reshuffling at pass boundaries.
    std::vector<std::size_t> next();

    std::size_t batches_per_pass() const;

  private:
    void reshuffle();

    std::size_t n_;
    std::size_t batch_size_;
    std::uint64_t seed_;
    std::uint64_t pass_ = 0;
    std::size_t cursor_ = 0;
    std::vector<std::size_t> order_;
};

/// Gather rows of a dataset into a batch matrix (and one-hot targets).
Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& idx);
Matrix one_hot(const std::vector<int>& labels, const std::vector<std::size_t>& idx, int classes);

} // namespace ict
