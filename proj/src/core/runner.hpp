#pragma once

#include <string>

#include "config.hpp"
#include "data.hpp"
#include "eval.hpp"
#include "trainer.hpp"

namespace ict {

/// Resolved training run assembled from a Config (keys under "train.").
struct RunPlan {
    IctConfig ict;
    std::string method = "ict";
    std::size_t hidden_layers = 3;
    std::size_t hidden_units = 20;
    bool standardize = true;
    long log_interval = 1;
    long checkpoint_interval = 0;  // 0 disables intermediate checkpoints
    Config resolved;               // every effective train.* key
};

/// Fill a RunPlan from config + method preset, writing every effective value
/// back into plan.resolved so a manifest replays the run exactly.
RunPlan resolve_run(const Config& cfg);

/// Build the source dataset named by train.data.* (generator or CSV).
Dataset build_dataset(const Config& cfg);

/// Split per train.split.* (defaults: 3 labels/class, 1000 unlabeled,
/// 500 validation, 1000 test, labeled included in the unlabeled pool).
Splits build_splits(const Config& cfg, const Dataset& ds);

struct TrainOutputs {
    TrainResult result;
    Config resolved;
    double final_test_error = -1.0;
    std::string manifest_path;
    std::string trace_path;
    std::string student_path;
    std::string teacher_path;
};

/// Full train run: dataset, split, standardization, training, and artifacts
/// (manifest, trace, checkpoints) under out_dir.
TrainOutputs run_train(const Config& cfg, const std::string& out_dir);

/// `trials` runs with seeds seed+0..seed+trials-1, each under
/// out_dir/trial_<i>; aggregate report written to report_path.
TrialReport run_experiment(const Config& cfg, std::size_t trials, const std::string& out_dir,
                           const std::string& report_path);

/// Dataset generation for the CLI: writes CSV plus a provenance sidecar.
void run_generate(const std::string& generator, const Config& cfg, const std::string& out_path);

std::string version_string();

} // namespace ict
