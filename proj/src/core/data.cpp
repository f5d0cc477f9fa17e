#include "data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ict {

namespace {

void fnv_bytes(std::uint64_t& h, const void* p, std::size_t n) {
    const unsigned char* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
    }
}

std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{seed, stream};
    return std::mt19937_64(seq);
}

void append_value(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

} // namespace

std::uint64_t dataset_fingerprint(const Dataset& ds) {
    std::uint64_t h = 14695981039346656037ULL;
    fnv_bytes(h, ds.inputs.data.data(), ds.inputs.data.size() * sizeof(double));
    fnv_bytes(h, ds.labels.data(), ds.labels.size() * sizeof(int));
    fnv_bytes(h, &ds.class_count, sizeof(ds.class_count));
    return h;
}

Dataset two_moons(std::size_t n, double noise_sd, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("two_moons: need at least 2 points");
    const std::size_t upper = (n + 1) / 2;
    const std::size_t lower = n - upper;
    Dataset ds;
    ds.inputs = Matrix(n, 2);
    ds.labels.resize(n);
    ds.class_count = 2;
    ds.name = "two_moons";
    ds.provenance = "two_moons n=" + std::to_string(n) + " noise_sd=" + std::to_string(noise_sd) +
                    " seed=" + std::to_string(seed);
    auto rng = seeded_rng(seed, 0x7a6d6f6f6e73ULL);
    std::normal_distribution<double> noise(0.0, 1.0);
    auto phi_at = [](std::size_t i, std::size_t m) {
        return m > 1 ? std::numbers::pi * static_cast<double>(i) / static_cast<double>(m - 1)
                     : 0.0;
    };
    for (std::size_t i = 0; i < upper; ++i) {
        double phi = phi_at(i, upper);
        ds.inputs(i, 0) = std::cos(phi);
        ds.inputs(i, 1) = std::sin(phi);
        ds.labels[i] = 0;
    }
    for (std::size_t i = 0; i < lower; ++i) {
        double phi = phi_at(i, lower);
        ds.inputs(upper + i, 0) = 1.0 - std::cos(phi);
        ds.inputs(upper + i, 1) = 0.5 - std::sin(phi);
        ds.labels[upper + i] = 1;
    }
    if (noise_sd > 0.0) {
        for (double& v : ds.inputs.data) v += noise_sd * noise(rng);
    }
    return ds;
}

Dataset gaussian_clusters(const std::vector<std::vector<double>>& centers,
                          std::size_t per_cluster, double sd,
                          const std::vector<int>& class_of_cluster, std::uint64_t seed) {
    if (centers.size() < 2) throw std::invalid_argument("gaussian_clusters: need >= 2 clusters");
    if (class_of_cluster.size() != centers.size()) {
        throw std::invalid_argument("gaussian_clusters: class mapping size mismatch");
    }
    const std::size_t dim = centers.front().size();
    int max_class = 0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
        if (centers[c].size() != dim) {
            throw std::invalid_argument("gaussian_clusters: inconsistent center dimensions");
        }
        if (class_of_cluster[c] < 0) {
            throw std::invalid_argument("gaussian_clusters: negative class in mapping");
        }
        max_class = std::max(max_class, class_of_cluster[c]);
    }
    Dataset ds;
    ds.inputs = Matrix(centers.size() * per_cluster, dim);
    ds.labels.resize(ds.inputs.rows);
    ds.class_count = max_class + 1;
    ds.name = "gaussian_clusters";
    ds.provenance = "gaussian_clusters clusters=" + std::to_string(centers.size()) +
                    " per_cluster=" + std::to_string(per_cluster) + " sd=" + std::to_string(sd) +
                    " seed=" + std::to_string(seed);
    auto rng = seeded_rng(seed, 0x636c7573ULL);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::size_t row = 0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
        for (std::size_t i = 0; i < per_cluster; ++i, ++row) {
            for (std::size_t d = 0; d < dim; ++d) {
                ds.inputs(row, d) = centers[c][d] + sd * noise(rng);
            }
            ds.labels[row] = class_of_cluster[c];
        }
    }
    return ds;
}

namespace {

Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& idx, bool keep_labels,
                  const std::string& part) {
    Dataset out;
    out.inputs = gather_rows(ds.inputs, idx);
    if (keep_labels && ds.has_labels()) {
        out.labels.reserve(idx.size());
        for (std::size_t i : idx) out.labels.push_back(ds.labels[i]);
    }
    out.class_count = ds.class_count;
    out.name = ds.name + "/" + part;
    out.provenance = ds.provenance;
    return out;
}

} // namespace

Splits split(const Dataset& ds, const SplitSpec& spec) {
    if (!ds.has_labels()) throw std::invalid_argument("split: dataset has no labels");
    auto rng = seeded_rng(spec.seed, 0x73706c6974ULL);

    std::vector<std::vector<std::size_t>> by_class(ds.class_count);
    for (std::size_t i = 0; i < ds.size(); ++i) by_class[ds.labels[i]].push_back(i);

    std::vector<std::size_t> labeled_idx;
    std::vector<char> taken(ds.size(), 0);
    for (int c = 0; c < ds.class_count; ++c) {
        if (by_class[c].size() < spec.labels_per_class) {
            throw std::invalid_argument(
                "split: class " + std::to_string(c) + " has " +
                std::to_string(by_class[c].size()) + " samples, need " +
                std::to_string(spec.labels_per_class) + " (short by " +
                std::to_string(spec.labels_per_class - by_class[c].size()) + ")");
        }
        std::shuffle(by_class[c].begin(), by_class[c].end(), rng);
        for (std::size_t k = 0; k < spec.labels_per_class; ++k) {
            labeled_idx.push_back(by_class[c][k]);
            taken[by_class[c][k]] = 1;
        }
    }

    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (!taken[i]) pool.push_back(i);
    }
    const std::size_t needed = spec.unlabeled_count + spec.validation_count + spec.test_count;
    if (pool.size() < needed) {
        throw std::invalid_argument("split: need " + std::to_string(needed) +
                                    " non-labeled rows, only " + std::to_string(pool.size()) +
                                    " available (short by " + std::to_string(needed - pool.size()) +
                                    ")");
    }
    std::shuffle(pool.begin(), pool.end(), rng);

    auto cut = pool.begin();
    std::vector<std::size_t> unlabeled_idx(cut, cut + spec.unlabeled_count);
    cut += spec.unlabeled_count;
    std::vector<std::size_t> val_idx(cut, cut + spec.validation_count);
    cut += spec.validation_count;
    std::vector<std::size_t> test_idx(cut, cut + spec.test_count);

    if (spec.include_labeled_in_unlabeled) {
        unlabeled_idx.insert(unlabeled_idx.end(), labeled_idx.begin(), labeled_idx.end());
    }

    Splits out;
    out.labeled = take_rows(ds, labeled_idx, true, "labeled");
    out.unlabeled = take_rows(ds, unlabeled_idx, false, "unlabeled");
    out.validation = take_rows(ds, val_idx, true, "validation");
    out.test = take_rows(ds, test_idx, true, "test");
    return out;
}

Standardizer Standardizer::fit(const Dataset& source) {
    if (source.size() == 0) throw std::invalid_argument("standardize: empty statistics source");
    const std::size_t d = source.dim();
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.sd.assign(d, 0.0);
    for (std::size_t i = 0; i < source.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += source.inputs(i, j);
    }
    for (double& m : s.mean) m /= static_cast<double>(source.size());
    for (std::size_t i = 0; i < source.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            double dev = source.inputs(i, j) - s.mean[j];
            s.sd[j] += dev * dev;
        }
    }
    for (double& v : s.sd) v = std::max(std::sqrt(v / static_cast<double>(source.size())), 1e-8);
    return s;
}

Dataset Standardizer::apply(const Dataset& ds) const {
    if (ds.dim() != mean.size()) throw std::invalid_argument("standardize: dimension mismatch");
    Dataset out = ds;
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t j = 0; j < out.dim(); ++j) {
            out.inputs(i, j) = (out.inputs(i, j) - mean[j]) / sd[j];
        }
    }
    return out;
}

void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_csv: cannot open " + path);
    std::string text;
    for (std::size_t j = 0; j < ds.dim(); ++j) {
        if (j) text += ',';
        text += "f" + std::to_string(j);
    }
    if (ds.has_labels()) text += ",label";
    text += '\n';
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = 0; j < ds.dim(); ++j) {
            if (j) text += ',';
            append_value(text, ds.inputs(i, j));
        }
        if (ds.has_labels()) text += "," + std::to_string(ds.labels[i]);
        text += '\n';
    }
    out << text;
}

Dataset ingest_csv(const std::string& path, std::optional<int> expected_class_count) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ingest_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("ingest_csv: empty file " + path);

    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    bool has_label = !header.empty() && header.back() == "label";
    std::size_t dim = header.size() - (has_label ? 1 : 0);
    for (std::size_t j = 0; j < dim; ++j) {
        if (header[j] != "f" + std::to_string(j)) {
            throw std::runtime_error("ingest_csv: bad header column " + std::to_string(j) +
                                     " in " + path);
        }
    }
    if (expected_class_count && !has_label) {
        throw std::runtime_error("ingest_csv: labels expected but no label column in " + path);
    }
    if (dim == 0) throw std::runtime_error("ingest_csv: no feature columns in " + path);

    std::vector<double> values;
    std::vector<int> labels;
    std::size_t rows = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            if (col < dim) {
                double v = std::strtod(cell.c_str(), &end);
                if (end == cell.c_str() || *end != '\0') {
                    throw std::runtime_error("ingest_csv: malformed value at line " +
                                             std::to_string(lineno) + " in " + path);
                }
                values.push_back(v);
            } else {
                long lab = std::strtol(cell.c_str(), &end, 10);
                if (end == cell.c_str() || *end != '\0' || lab < 0) {
                    throw std::runtime_error("ingest_csv: malformed label at line " +
                                             std::to_string(lineno) + " in " + path);
                }
                labels.push_back(static_cast<int>(lab));
            }
            ++col;
        }
        if (col != header.size()) {
            throw std::runtime_error("ingest_csv: wrong column count at line " +
                                     std::to_string(lineno) + " in " + path);
        }
        ++rows;
    }
    if (rows == 0) throw std::runtime_error("ingest_csv: no data rows in " + path);

    Dataset ds;
    ds.inputs = Matrix(rows, dim);
    ds.inputs.data = std::move(values);
    ds.labels = std::move(labels);
    ds.name = path;
    ds.provenance = "csv " + path;
    if (has_label) {
        int max_label = *std::max_element(ds.labels.begin(), ds.labels.end());
        ds.class_count = expected_class_count.value_or(max_label + 1);
        if (max_label >= ds.class_count) {
            throw std::runtime_error("ingest_csv: label " + std::to_string(max_label) +
                                     " out of range for " + std::to_string(ds.class_count) +
                                     " classes in " + path);
        }
    }
    return ds;
}

BatchIterator::BatchIterator(std::size_t n, std::size_t batch_size, std::uint64_t seed)
    : n_(n), batch_size_(batch_size), seed_(seed) {
    if (n == 0) throw std::invalid_argument("batches: empty dataset");
    if (batch_size == 0) throw std::invalid_argument("batches: batch size must be >= 1");
    order_.resize(n);
    for (std::size_t i = 0; i < n; ++i) order_[i] = i;
    reshuffle();
}

void BatchIterator::reshuffle() {
    auto rng = seeded_rng(seed_, pass_);
    std::shuffle(order_.begin(), order_.end(), rng);
}

std::vector<std::size_t> BatchIterator::next() {
    if (cursor_ >= n_) {
        cursor_ = 0;
        ++pass_;
        reshuffle();
    }
    std::size_t take = std::min(batch_size_, n_ - cursor_);
    std::vector<std::size_t> batch(order_.begin() + cursor_, order_.begin() + cursor_ + take);
    cursor_ += take;
    return batch;
}

std::size_t BatchIterator::batches_per_pass() const {
    return (n_ + batch_size_ - 1) / batch_size_;
}

Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& idx) {
    Matrix out(idx.size(), m.cols);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const double* src = m.row(idx[i]);
        std::copy(src, src + m.cols, out.row(i));
    }
    return out;
}

Matrix one_hot(const std::vector<int>& labels, const std::vector<std::size_t>& idx, int classes) {
    Matrix out(idx.size(), classes);
    for (std::size_t i = 0; i < idx.size(); ++i) out(i, labels[idx[i]]) = 1.0;
    return out;
}

} // namespace ict
