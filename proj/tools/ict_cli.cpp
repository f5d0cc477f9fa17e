// Experiment CLI. Links the public C API only; all heavy lifting lives in
// the shared library.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ict/ict.h"

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("ICT_OUT_DIR");
    return env ? env : "runs";
}

std::string read_file_or_die(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::fprintf(stderr, "error: cannot open config file %s\n", path.c_str());
        std::exit(2);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Config text resolution: defaults (in the library) <- config file <- --set
// overrides <- dedicated flags, in increasing precedence.
std::string build_config(const std::string& config_file, const std::string& section,
                         const std::vector<std::string>& sets,
                         const std::vector<std::string>& flag_overrides) {
    std::string text;
    if (!config_file.empty()) text += read_file_or_die(config_file) + "\n";
    text += "[" + section + "]\n";
    for (const auto& kv : sets) text += kv + "\n";
    for (const auto& kv : flag_overrides) text += kv + "\n";
    return text;
}

int api_exit(int status) {
    if (status != ICT_OK) std::fprintf(stderr, "error: %s\n", ict_last_error());
    return status;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interpolation consistency training experiments"};
    app.require_subcommand(1);

    std::string config_file;
    std::string out_dir = default_out_dir();
    std::vector<std::string> sets;

    // generate
    auto* gen = app.add_subcommand("generate", "Write a synthetic dataset CSV");
    std::string generator;
    long gen_n = 2506;
    double gen_noise = 0.1;
    long gen_seed = 1;
    std::string gen_out;
    gen->add_option("generator", generator, "two_moons or gaussian_clusters")->required();
    gen->add_option("--n", gen_n, "number of points (two_moons)");
    gen->add_option("--noise", gen_noise, "noise standard deviation (two_moons)");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output CSV path")->required();
    gen->add_option("--set", sets, "extra generate.* key=value settings");

    // train
    auto* train = app.add_subcommand("train", "Run one training run");
    std::string method = "ict";
    long seed = 1, epochs = 100;
    double w_max = 1.0, beta_alpha = 1.0, ema_decay = 0.999, lr = 0.1;
    train->add_option("--config", config_file, "config file (flat key = value with sections)");
    train->add_option("--method", method, "ict | supervised | supervised_mixup | ict_no_teacher");
    train->add_option("--seed", seed, "run seed");
    train->add_option("--epochs", epochs, "total epochs (one epoch = one unlabeled pass)");
    train->add_option("--w-max", w_max, "max consistency coefficient");
    train->add_option("--beta-alpha", beta_alpha, "Beta(alpha, alpha) shape for lambda");
    train->add_option("--ema-decay", ema_decay, "mean-teacher EMA decay");
    train->add_option("--lr", lr, "initial learning rate");
    train->add_option("--out", out_dir, "output directory (or $ICT_OUT_DIR)");
    train->add_option("--set", sets, "extra train.* key=value settings");

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a labeled CSV");
    std::string ckpt_path, data_path;
    int class_count = 0;
    eval->add_option("--checkpoint", ckpt_path, "model checkpoint")->required();
    eval->add_option("--data", data_path, "labeled dataset CSV")->required();
    eval->add_option("--class-count", class_count, "class count (default: infer from labels)");

    // experiment
    auto* exp = app.add_subcommand("experiment", "Run N trials and aggregate mean +- sd");
    int trials = 3;
    std::string report_path;
    exp->add_option("--config", config_file, "config file");
    exp->add_option("--trials", trials, "number of trials (seeds seed+0..seed+trials-1)");
    exp->add_option("--method", method, "training method");
    exp->add_option("--seed", seed, "base seed");
    exp->add_option("--out", out_dir, "output directory");
    exp->add_option("--report", report_path, "report path (default <out>/report.txt)");
    exp->add_option("--set", sets, "extra train.* key=value settings");

    // export-boundary
    auto* bnd = app.add_subcommand("export-boundary", "Export a decision-boundary grid CSV");
    double x_min = -2.5, x_max = 3.5, y_min = -2.5, y_max = 2.5;
    int res_x = 100, res_y = 100;
    std::string bnd_out;
    bnd->add_option("--checkpoint", ckpt_path, "model checkpoint (2-D input)")->required();
    bnd->add_option("--out", bnd_out, "output CSV path")->required();
    bnd->add_option("--x-min", x_min);
    bnd->add_option("--x-max", x_max);
    bnd->add_option("--y-min", y_min);
    bnd->add_option("--y-max", y_max);
    bnd->add_option("--res-x", res_x);
    bnd->add_option("--res-y", res_y);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (gen->parsed()) {
        std::vector<std::string> flags = {
            "n = " + std::to_string(gen_n),
            "noise_sd = " + std::to_string(gen_noise),
            "seed = " + std::to_string(gen_seed),
        };
        std::string cfg = build_config("", "generate", sets, flags);
        return api_exit(ict_generate_run(generator.c_str(), cfg.c_str(), gen_out.c_str()));
    }

    if (train->parsed()) {
        std::vector<std::string> flags;
        auto flag = [&](const char* name, const std::string& kv) {
            if (train->count(name)) flags.push_back(kv);
        };
        flag("--method", "method = " + method);
        flag("--seed", "seed = " + std::to_string(seed));
        flag("--epochs", "epochs = " + std::to_string(epochs));
        flag("--w-max", "w_max = " + std::to_string(w_max));
        flag("--beta-alpha", "beta_alpha = " + std::to_string(beta_alpha));
        flag("--ema-decay", "ema_decay = " + std::to_string(ema_decay));
        flag("--lr", "lr = " + std::to_string(lr));
        std::string cfg = build_config(config_file, "train", sets, flags);
        double test_error = -1.0;
        int status = ict_train_run(cfg.c_str(), out_dir.c_str(), &test_error);
        if (status != ICT_OK) return api_exit(status);
        std::printf("run_dir=%s\n", out_dir.c_str());
        if (test_error >= 0.0) std::printf("test_error_percent=%.2f\n", test_error);
        return 0;
    }

    if (eval->parsed()) {
        ict_model* model = nullptr;
        ict_dataset* ds = nullptr;
        int status = ict_model_load(ckpt_path.c_str(), &model);
        if (status != ICT_OK) return api_exit(status);
        status = ict_dataset_load_csv(data_path.c_str(), class_count, &ds);
        if (status != ICT_OK) {
            ict_model_free(model);
            return api_exit(status);
        }
        double error = 0.0;
        status = ict_model_error_rate(model, ds, &error);
        ict_dataset_free(ds);
        ict_model_free(model);
        if (status != ICT_OK) return api_exit(status);
        std::printf("test_error_percent=%.2f\n", error);
        return 0;
    }

    if (exp->parsed()) {
        std::vector<std::string> flags;
        if (exp->count("--method")) flags.push_back("method = " + method);
        if (exp->count("--seed")) flags.push_back("seed = " + std::to_string(seed));
        std::string cfg = build_config(config_file, "train", sets, flags);
        if (report_path.empty()) report_path = out_dir + "/report.txt";
        double mean = 0.0, sd = 0.0;
        int status =
            ict_experiment_run(cfg.c_str(), trials, out_dir.c_str(), report_path.c_str(), &mean, &sd);
        if (status != ICT_OK) return api_exit(status);
        std::printf("report=%s\nmean_error_percent=%.2f\nsd_error_percent=%.2f\n",
                    report_path.c_str(), mean, sd);
        return 0;
    }

    if (bnd->parsed()) {
        ict_model* model = nullptr;
        int status = ict_model_load(ckpt_path.c_str(), &model);
        if (status != ICT_OK) return api_exit(status);
        status = ict_model_export_boundary(model, x_min, x_max, y_min, y_max, res_x, res_y,
                                           bnd_out.c_str());
        ict_model_free(model);
        if (status != ICT_OK) return api_exit(status);
        std::printf("boundary=%s\n", bnd_out.c_str());
        return 0;
    }

    return 2;
}
