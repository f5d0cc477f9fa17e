#include "ict/ict.h"

#include <cstring>
#include <stdexcept>
#include <string>

#include "../core/config.hpp"
#include "../core/data.hpp"
#include "../core/eval.hpp"
#include "../core/network.hpp"
#include "../core/runner.hpp"

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* what) {
    g_last_error = what;
    return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return ICT_OK;
    } catch (const std::invalid_argument& e) {
        return fail(ICT_ERROR_USAGE, e.what());
    } catch (const std::runtime_error& e) {
        // Numeric aborts are raised as runtime_error mentioning the loss term.
        std::string msg = e.what();
        int code = msg.find("non-finite") != std::string::npos ? ICT_ERROR_NUMERIC
                                                               : ICT_ERROR_USAGE;
        return fail(code, e.what());
    } catch (const std::exception& e) {
        return fail(ICT_ERROR_USAGE, e.what());
    }
}

} // namespace

struct ict_dataset {
    ict::Dataset ds;
};

struct ict_model {
    ict::Network net;
};

extern "C" {

const char* ict_last_error(void) { return g_last_error.c_str(); }

const char* ict_version(void) {
    static const std::string v = ict::version_string();
    return v.c_str();
}

int ict_dataset_two_moons(int64_t n, double noise_sd, uint64_t seed, ict_dataset** out) {
    if (!out) return fail(ICT_ERROR_USAGE, "out pointer is null");
    return guarded([&] {
        if (n < 2) throw std::invalid_argument("two_moons: need at least 2 points");
        *out = new ict_dataset{ict::two_moons(static_cast<std::size_t>(n), noise_sd, seed)};
    });
}

int ict_dataset_load_csv(const char* path, int class_count, ict_dataset** out) {
    if (!path || !out) return fail(ICT_ERROR_USAGE, "null argument");
    return guarded([&] {
        std::optional<int> classes;
        if (class_count > 0) classes = class_count;
        *out = new ict_dataset{ict::ingest_csv(path, classes)};
    });
}

int ict_dataset_save_csv(const ict_dataset* ds, const char* path) {
    if (!ds || !path) return fail(ICT_ERROR_USAGE, "null argument");
    return guarded([&] { ict::save_csv(ds->ds, path); });
}

int64_t ict_dataset_rows(const ict_dataset* ds) {
    return ds ? static_cast<int64_t>(ds->ds.size()) : -1;
}

int ict_dataset_dim(const ict_dataset* ds) { return ds ? static_cast<int>(ds->ds.dim()) : -1; }

int ict_dataset_class_count(const ict_dataset* ds) { return ds ? ds->ds.class_count : -1; }

uint64_t ict_dataset_fingerprint(const ict_dataset* ds) {
    return ds ? ict::dataset_fingerprint(ds->ds) : 0;
}

void ict_dataset_free(ict_dataset* ds) { delete ds; }

int ict_model_load(const char* checkpoint_path, ict_model** out) {
    if (!checkpoint_path || !out) return fail(ICT_ERROR_USAGE, "null argument");
    return guarded([&] { *out = new ict_model{ict::load_checkpoint(checkpoint_path)}; });
}

int ict_model_save(const ict_model* model, const char* checkpoint_path) {
    if (!model || !checkpoint_path) return fail(ICT_ERROR_USAGE, "null argument");
    return guarded([&] { ict::save_checkpoint(model->net, checkpoint_path); });
}

int ict_model_input_dim(const ict_model* model) {
    return model ? static_cast<int>(model->net.input_dim()) : -1;
}

int ict_model_class_count(const ict_model* model) {
    return model ? static_cast<int>(model->net.num_classes()) : -1;
}

int ict_model_predict(const ict_model* model, const double* x, int64_t rows, int cols,
                      double* probs_out) {
    if (!model || !x || !probs_out) return fail(ICT_ERROR_USAGE, "null argument");
    return guarded([&] {
        if (rows < 1 || cols < 1) throw std::invalid_argument("predict: empty input");
        ict::Matrix batch(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
        std::memcpy(batch.data.data(), x, batch.data.size() * sizeof(double));
        ict::Matrix probs = model->net.forward(batch);
        std::memcpy(probs_out, probs.data.data(), probs.data.size() * sizeof(double));
    });
}

int ict_model_error_rate(const ict_model* model, const ict_dataset* ds, double* percent_out) {
    if (!model || !ds || !percent_out) return fail(ICT_ERROR_USAGE, "null argument");
    return guarded([&] { *percent_out = ict::error_rate(model->net, ds->ds); });
}

int ict_model_export_boundary(const ict_model* model, double x_min, double x_max, double y_min,
                              double y_max, int res_x, int res_y, const char* csv_path) {
    if (!model || !csv_path) return fail(ICT_ERROR_USAGE, "null argument");
    return guarded([&] {
        ict::GridSpec spec;
        spec.x_min = x_min;
        spec.x_max = x_max;
        spec.y_min = y_min;
        spec.y_max = y_max;
        spec.res_x = static_cast<std::size_t>(res_x);
        spec.res_y = static_cast<std::size_t>(res_y);
        ict::export_boundary(model->net, spec, csv_path);
    });
}

void ict_model_free(ict_model* model) { delete model; }

int ict_train_run(const char* config_text, const char* out_dir, double* final_test_error_out) {
    if (!config_text || !out_dir) return fail(ICT_ERROR_USAGE, "null argument");
    return guarded([&] {
        ict::Config cfg = ict::Config::parse_text(config_text);
        ict::TrainOutputs out = ict::run_train(cfg, out_dir);
        if (final_test_error_out) *final_test_error_out = out.final_test_error;
    });
}

int ict_experiment_run(const char* config_text, int trials, const char* out_dir,
                       const char* report_path, double* mean_out, double* sd_out) {
    if (!config_text || !out_dir || !report_path) return fail(ICT_ERROR_USAGE, "null argument");
    return guarded([&] {
        if (trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
        ict::Config cfg = ict::Config::parse_text(config_text);
        ict::TrialReport report =
            ict::run_experiment(cfg, static_cast<std::size_t>(trials), out_dir, report_path);
        if (mean_out) *mean_out = report.mean;
        if (sd_out) *sd_out = report.sd;
    });
}

int ict_generate_run(const char* generator, const char* config_text, const char* out_path) {
    if (!generator || !config_text || !out_path) return fail(ICT_ERROR_USAGE, "null argument");
    return guarded([&] {
        ict::Config cfg = ict::Config::parse_text(config_text);
        ict::run_generate(generator, cfg, out_path);
    });
}

} // extern "C"
