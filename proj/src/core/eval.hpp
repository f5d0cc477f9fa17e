#pragma once

#include <string>
#include <vector>

#include "data.hpp"
#include "network.hpp"

namespace ict {

/// Percentage of rows whose argmax prediction disagrees with the label.
/// Argmax ties break toward the lowest class index.
double error_rate(const Network& net, const Dataset& ds);

struct TrialReport {
    std::vector<double> errors;  // per-trial test error %
    double mean = 0.0;
    double sd = 0.0;             // sample sd (n-1); 0 for a single trial
    std::vector<std::uint64_t> seeds;
    std::string config_fingerprint;
};

TrialReport aggregate_trials(const std::vector<double>& errors);

void write_trial_report(const TrialReport& report, const std::string& path);

struct GridSpec {
    double x_min = -2.0, x_max = 3.0;
    double y_min = -2.0, y_max = 2.0;
    std::size_t res_x = 100, res_y = 100;
};

struct BoundaryGrid {
    GridSpec spec;
    Matrix probs;  // (res_x * res_y) x classes, lattice-major (y outer, x inner)
};

/// Evaluate class probabilities on a 2-D lattice. Read-only on the model;
/// requires a 2-D input network.
BoundaryGrid eval_boundary(const Network& net, const GridSpec& spec);

/// eval_boundary plus CSV output with rows `x,y,p0,...,p{C-1}`.
BoundaryGrid export_boundary(const Network& net, const GridSpec& spec, const std::string& path);

} // namespace ict
