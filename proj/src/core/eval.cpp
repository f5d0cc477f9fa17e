#include "eval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ict {

double error_rate(const Network& net, const Dataset& ds) {
    if (!ds.has_labels()) throw std::invalid_argument("error_rate: dataset has no labels");
    Matrix probs = net.forward(ds.inputs);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < probs.rows; ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < probs.cols; ++c) {
            if (probs(i, c) > probs(i, best)) best = c;
        }
        if (static_cast<int>(best) != ds.labels[i]) ++wrong;
    }
    return 100.0 * static_cast<double>(wrong) / static_cast<double>(probs.rows);
}

TrialReport aggregate_trials(const std::vector<double>& errors) {
    if (errors.empty()) throw std::invalid_argument("aggregate_trials: no trials");
    TrialReport report;
    report.errors = errors;
    double sum = 0.0;
    for (double e : errors) sum += e;
    report.mean = sum / static_cast<double>(errors.size());
    if (errors.size() > 1) {
        double ss = 0.0;
        for (double e : errors) ss += (e - report.mean) * (e - report.mean);
        report.sd = std::sqrt(ss / static_cast<double>(errors.size() - 1));
    }
    return report;
}

void write_trial_report(const TrialReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("trial report: cannot open " + path);
    char buf[64];
    out << "trials = " << report.errors.size() << "\n";
    for (std::size_t i = 0; i < report.errors.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", report.errors[i]);
        out << "trial_" << i << "_error_percent = " << buf;
        if (i < report.seeds.size()) out << "  # seed " << report.seeds[i];
        out << "\n";
    }
    std::snprintf(buf, sizeof(buf), "%.17g", report.mean);
    out << "mean = " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", report.sd);
    out << "sd = " << buf << "\n";
    if (!report.config_fingerprint.empty()) {
        out << "config_fingerprint = " << report.config_fingerprint << "\n";
    }
}

BoundaryGrid eval_boundary(const Network& net, const GridSpec& spec) {
    if (net.input_dim() != 2) {
        throw std::invalid_argument("export_boundary: model input dimension must be 2");
    }
    if (spec.res_x < 2 || spec.res_y < 2) {
        throw std::invalid_argument("export_boundary: resolution must be >= 2 per axis");
    }
    Matrix lattice(spec.res_x * spec.res_y, 2);
    std::size_t row = 0;
    for (std::size_t yi = 0; yi < spec.res_y; ++yi) {
        double y = spec.y_min + (spec.y_max - spec.y_min) * static_cast<double>(yi) /
                                    static_cast<double>(spec.res_y - 1);
        for (std::size_t xi = 0; xi < spec.res_x; ++xi, ++row) {
            double x = spec.x_min + (spec.x_max - spec.x_min) * static_cast<double>(xi) /
                                        static_cast<double>(spec.res_x - 1);
            lattice(row, 0) = x;
            lattice(row, 1) = y;
        }
    }
    BoundaryGrid grid;
    grid.spec = spec;
    grid.probs = net.forward(lattice);
    return grid;
}

BoundaryGrid export_boundary(const Network& net, const GridSpec& spec, const std::string& path) {
    BoundaryGrid grid = eval_boundary(net, spec);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_boundary: cannot open " + path);
    std::string text = "x,y";
    for (std::size_t c = 0; c < grid.probs.cols; ++c) text += ",p" + std::to_string(c);
    text += '\n';
    char buf[40];
    std::size_t row = 0;
    for (std::size_t yi = 0; yi < spec.res_y; ++yi) {
        double y = spec.y_min + (spec.y_max - spec.y_min) * static_cast<double>(yi) /
                                    static_cast<double>(spec.res_y - 1);
        for (std::size_t xi = 0; xi < spec.res_x; ++xi, ++row) {
            double x = spec.x_min + (spec.x_max - spec.x_min) * static_cast<double>(xi) /
                                        static_cast<double>(spec.res_x - 1);
            std::snprintf(buf, sizeof(buf), "%.17g", x);
            text += buf;
            text += ',';
            std::snprintf(buf, sizeof(buf), "%.17g", y);
            text += buf;
            for (std::size_t c = 0; c < grid.probs.cols; ++c) {
                std::snprintf(buf, sizeof(buf), "%.17g", grid.probs(row, c));
                text += ',';
                text += buf;
            }
            text += '\n';
        }
    }
    out << text;
    return grid;
}

} // namespace ict
