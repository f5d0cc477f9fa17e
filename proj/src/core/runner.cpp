#include "runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ict {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_compact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

} // namespace

std::string version_string() { return "0.1.0"; }

RunPlan resolve_run(const Config& cfg) {
    RunPlan plan;
    plan.method = cfg.get("train.method", "ict");

    IctConfig& c = plan.ict;
    c.seed = static_cast<std::uint64_t>(cfg.get_long("train.seed", 1));
    c.total_epochs = static_cast<std::size_t>(cfg.get_long("train.epochs", 100));
    c.beta_alpha = cfg.get_double("train.beta_alpha", 1.0);
    c.w_max = cfg.get_double("train.w_max", 1.0);
    c.ramp_fraction = cfg.get_double("train.ramp_fraction", 0.25);
    c.ema_decay = cfg.get_double("train.ema_decay", 0.999);
    c.ema_after_step = cfg.get_bool("train.ema_after_step", false);
    c.ema_warmup = cfg.get_bool("train.ema_warmup", true);
    c.labeled_batch = static_cast<std::size_t>(cfg.get_long("train.labeled_batch", 100));
    c.unlabeled_batch = static_cast<std::size_t>(cfg.get_long("train.unlabeled_batch", 100));
    c.base_lr = cfg.get_double("train.lr", 0.1);
    c.momentum = cfg.get_double("train.momentum", 0.9);
    c.l2 = cfg.get_double("train.l2", 0.0001);
    c.pair_shuffled_self = cfg.get_bool("train.pair_shuffled_self", false);

    std::string sup_mode = cfg.get("train.supervised_mode", "mixup");
    std::string teacher_mode = cfg.get("train.teacher_mode", "mean_teacher");
    std::string eval_net = cfg.get("train.eval_network", "teacher");

    if (plan.method == "ict") {
        // defaults as-is
    } else if (plan.method == "supervised") {
        c.w_max = 0.0;
        sup_mode = "vanilla";
    } else if (plan.method == "supervised_mixup") {
        c.w_max = 0.0;
        sup_mode = "mixup";
    } else if (plan.method == "ict_no_teacher") {
        teacher_mode = "student";
    } else {
        throw std::invalid_argument("config: unknown method " + plan.method);
    }

    if (sup_mode == "mixup") {
        c.supervised_mode = SupervisedMode::Mixup;
    } else if (sup_mode == "vanilla") {
        c.supervised_mode = SupervisedMode::Vanilla;
    } else {
        throw std::invalid_argument("config: unknown supervised_mode " + sup_mode);
    }
    if (teacher_mode == "mean_teacher") {
        c.teacher_mode = TeacherMode::MeanTeacher;
    } else if (teacher_mode == "student") {
        c.teacher_mode = TeacherMode::Student;
    } else {
        throw std::invalid_argument("config: unknown teacher_mode " + teacher_mode);
    }
    if (eval_net == "teacher") {
        c.eval_network = EvalNetwork::Teacher;
    } else if (eval_net == "student") {
        c.eval_network = EvalNetwork::Student;
    } else {
        throw std::invalid_argument("config: unknown eval_network " + eval_net);
    }

    plan.hidden_layers = static_cast<std::size_t>(cfg.get_long("train.hidden_layers", 3));
    plan.hidden_units = static_cast<std::size_t>(cfg.get_long("train.hidden_units", 20));
    plan.standardize = cfg.get_bool("train.standardize", true);
    plan.log_interval = cfg.get_long("train.log_interval", 1);
    plan.checkpoint_interval = cfg.get_long("train.checkpoint_interval", 0);
    if (plan.log_interval < 1) throw std::invalid_argument("config: log_interval must be >= 1");

    c.validate();

    Config& r = plan.resolved;
    r.set("train.method", plan.method);
    r.set("train.seed", std::to_string(c.seed));
    r.set("train.epochs", std::to_string(c.total_epochs));
    r.set("train.beta_alpha", fmt_compact(c.beta_alpha));
    r.set("train.w_max", fmt_compact(c.w_max));
    r.set("train.ramp_fraction", fmt_compact(c.ramp_fraction));
    r.set("train.ema_decay", fmt_compact(c.ema_decay));
    r.set("train.ema_after_step", c.ema_after_step ? "true" : "false");
    r.set("train.ema_warmup", c.ema_warmup ? "true" : "false");
    r.set("train.labeled_batch", std::to_string(c.labeled_batch));
    r.set("train.unlabeled_batch", std::to_string(c.unlabeled_batch));
    r.set("train.lr", fmt_compact(c.base_lr));
    r.set("train.momentum", fmt_compact(c.momentum));
    r.set("train.l2", fmt_compact(c.l2));
    r.set("train.pair_shuffled_self", c.pair_shuffled_self ? "true" : "false");
    r.set("train.supervised_mode", sup_mode);
    r.set("train.teacher_mode", teacher_mode);
    r.set("train.eval_network", eval_net);
    r.set("train.hidden_layers", std::to_string(plan.hidden_layers));
    r.set("train.hidden_units", std::to_string(plan.hidden_units));
    r.set("train.standardize", plan.standardize ? "true" : "false");
    r.set("train.log_interval", std::to_string(plan.log_interval));
    r.set("train.checkpoint_interval", std::to_string(plan.checkpoint_interval));

    // Dataset + split settings, defaulted here so the manifest is complete.
    std::string gen = cfg.get("train.data.generator", "two_moons");
    r.set("train.data.generator", gen);
    long data_seed = cfg.get_long("train.data.seed", static_cast<long>(c.seed));
    r.set("train.data.seed", std::to_string(data_seed));
    if (gen == "two_moons") {
        r.set("train.data.n", std::to_string(cfg.get_long("train.data.n", 2506)));
        r.set("train.data.noise_sd", fmt_compact(cfg.get_double("train.data.noise_sd", 0.1)));
    } else if (gen == "gaussian_clusters") {
        r.set("train.data.centers", cfg.get("train.data.centers", "0,0;4,4"));
        r.set("train.data.classes", cfg.get("train.data.classes", "0;1"));
        r.set("train.data.per_cluster", std::to_string(cfg.get_long("train.data.per_cluster", 500)));
        r.set("train.data.sd", fmt_compact(cfg.get_double("train.data.sd", 0.5)));
    } else if (gen == "csv") {
        r.set("train.data.path", cfg.get("train.data.path", ""));
        if (cfg.has("train.data.class_count")) {
            r.set("train.data.class_count",
                  std::to_string(cfg.get_long("train.data.class_count", 0)));
        }
    } else {
        throw std::invalid_argument("config: unknown data.generator " + gen);
    }
    r.set("train.split.labels_per_class",
          std::to_string(cfg.get_long("train.split.labels_per_class", 3)));
    r.set("train.split.unlabeled_count",
          std::to_string(cfg.get_long("train.split.unlabeled_count", 1000)));
    r.set("train.split.validation_count",
          std::to_string(cfg.get_long("train.split.validation_count", 500)));
    r.set("train.split.test_count", std::to_string(cfg.get_long("train.split.test_count", 1000)));
    r.set("train.split.include_labeled_in_unlabeled",
          cfg.get_bool("train.split.include_labeled_in_unlabeled", true) ? "true" : "false");
    r.set("train.split.seed",
          std::to_string(cfg.get_long("train.split.seed", static_cast<long>(c.seed))));
    return plan;
}

Dataset build_dataset(const Config& cfg) {
    std::string gen = cfg.get("train.data.generator", "two_moons");
    std::uint64_t seed = static_cast<std::uint64_t>(
        cfg.get_long("train.data.seed", cfg.get_long("train.seed", 1)));
    if (gen == "two_moons") {
        return two_moons(static_cast<std::size_t>(cfg.get_long("train.data.n", 2506)),
                         cfg.get_double("train.data.noise_sd", 0.1), seed);
    }
    if (gen == "gaussian_clusters") {
        std::vector<std::vector<double>> centers;
        for (const std::string& pt : split_on(cfg.get("train.data.centers", "0,0;4,4"), ';')) {
            std::vector<double> coords;
            for (const std::string& v : split_on(pt, ',')) coords.push_back(std::stod(v));
            centers.push_back(std::move(coords));
        }
        std::vector<int> classes;
        for (const std::string& v : split_on(cfg.get("train.data.classes", "0;1"), ';')) {
            classes.push_back(std::stoi(v));
        }
        return gaussian_clusters(centers,
                                 static_cast<std::size_t>(
                                     cfg.get_long("train.data.per_cluster", 500)),
                                 cfg.get_double("train.data.sd", 0.5), classes, seed);
    }
    if (gen == "csv") {
        std::string path = cfg.get("train.data.path", "");
        if (path.empty()) throw std::invalid_argument("config: data.path required for csv data");
        std::optional<int> classes;
        if (cfg.has("train.data.class_count")) {
            classes = static_cast<int>(cfg.get_long("train.data.class_count", 0));
        }
        return ingest_csv(path, classes);
    }
    throw std::invalid_argument("config: unknown data.generator " + gen);
}

Splits build_splits(const Config& cfg, const Dataset& ds) {
    SplitSpec spec;
    spec.labels_per_class =
        static_cast<std::size_t>(cfg.get_long("train.split.labels_per_class", 3));
    spec.unlabeled_count =
        static_cast<std::size_t>(cfg.get_long("train.split.unlabeled_count", 1000));
    spec.validation_count =
        static_cast<std::size_t>(cfg.get_long("train.split.validation_count", 500));
    spec.test_count = static_cast<std::size_t>(cfg.get_long("train.split.test_count", 1000));
    spec.include_labeled_in_unlabeled =
        cfg.get_bool("train.split.include_labeled_in_unlabeled", true);
    spec.seed = static_cast<std::uint64_t>(
        cfg.get_long("train.split.seed", cfg.get_long("train.seed", 1)));
    return split(ds, spec);
}

TrainOutputs run_train(const Config& cfg, const std::string& out_dir) {
    RunPlan plan = resolve_run(cfg);
    std::filesystem::create_directories(out_dir);

    Dataset source = build_dataset(plan.resolved);
    Splits parts = build_splits(plan.resolved, source);
    if (plan.standardize) {
        Standardizer stats = Standardizer::fit(parts.unlabeled);
        parts.labeled = stats.apply(parts.labeled);
        parts.unlabeled = stats.apply(parts.unlabeled);
        parts.validation = stats.apply(parts.validation);
        parts.test = stats.apply(parts.test);
    }

    Network initial = make_mlp(parts.labeled.dim(), plan.hidden_layers, plan.hidden_units,
                               parts.labeled.class_count, plan.ict.seed);

    StepCallback snapshots;
    if (plan.checkpoint_interval > 0) {
        const long interval = plan.checkpoint_interval;
        const std::string dir = out_dir;
        snapshots = [interval, dir](std::uint64_t step, const Network& student,
                                    const Network& teacher) {
            if (step % static_cast<std::uint64_t>(interval) == 0) {
                save_checkpoint(student, dir + "/step_" + std::to_string(step) + "_student.ckpt");
                save_checkpoint(teacher, dir + "/step_" + std::to_string(step) + "_teacher.ckpt");
            }
        };
    }

    TrainOutputs out;
    out.result = train(plan.ict, initial, parts.labeled, parts.unlabeled, parts.validation,
                       snapshots);
    out.resolved = plan.resolved;

    const bool eval_teacher = plan.ict.eval_network == EvalNetwork::Teacher &&
                              plan.ict.teacher_mode == TeacherMode::MeanTeacher;
    const Network& eval_net = eval_teacher ? out.result.best_teacher : out.result.best_student;
    if (parts.test.size() > 0) out.final_test_error = error_rate(eval_net, parts.test);

    out.student_path = out_dir + "/student.ckpt";
    out.teacher_path = out_dir + "/teacher.ckpt";
    save_checkpoint(out.result.student, out.student_path);
    save_checkpoint(out.result.teacher, out.teacher_path);
    save_checkpoint(out.result.best_student, out_dir + "/best_student.ckpt");
    save_checkpoint(out.result.best_teacher, out_dir + "/best_teacher.ckpt");

    out.trace_path = out_dir + "/trace.csv";
    {
        std::ofstream trace(out.trace_path);
        if (!trace) throw std::runtime_error("run_train: cannot open " + out.trace_path);
        trace << "step,lr,w,loss_sup,loss_cons,loss_total,val_error\n";
        const auto& records = out.result.state.trace;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const TraceRecord& rec = records[i];
            bool logged = (rec.step % static_cast<std::uint64_t>(plan.log_interval) == 0) ||
                          i + 1 == records.size();
            if (!logged) continue;
            trace << rec.step << ',' << fmt17(rec.lr) << ',' << fmt17(rec.w) << ','
                  << fmt17(rec.loss_sup) << ',' << fmt17(rec.loss_cons) << ','
                  << fmt17(rec.loss_total) << ',' << fmt17(rec.val_error) << '\n';
        }
    }

    out.manifest_path = out_dir + "/manifest.txt";
    {
        std::ofstream man(out.manifest_path);
        if (!man) throw std::runtime_error("run_train: cannot open " + out.manifest_path);
        man << "[train]\n";
        for (const auto& [k, v] : plan.resolved.values()) {
            man << k.substr(std::string("train.").size()) << " = " << v << "\n";
        }
        man << "\n[meta]\n";
        man << "code_version = " << version_string() << "\n";
        man << "config_fingerprint = " << plan.resolved.fingerprint() << "\n";
        char buf[24];
        auto fp = [&buf](const Dataset& ds) {
            std::snprintf(buf, sizeof(buf), "%016llx",
                          static_cast<unsigned long long>(dataset_fingerprint(ds)));
            return std::string(buf);
        };
        man << "fingerprint_labeled = " << fp(parts.labeled) << "\n";
        man << "fingerprint_unlabeled = " << fp(parts.unlabeled) << "\n";
        man << "fingerprint_validation = " << fp(parts.validation) << "\n";
        man << "fingerprint_test = " << fp(parts.test) << "\n";
        man << "total_steps = " << out.result.total_steps << "\n";
        man << "ramp_steps = " << out.result.state.ramp_steps << "\n";
        man << "best_val_error = " << fmt17(out.result.best_val_error) << "\n";
        man << "best_val_epoch = " << out.result.best_val_epoch << "\n";
        man << "final_test_error = " << fmt17(out.final_test_error) << "\n";
    }
    return out;
}

TrialReport run_experiment(const Config& cfg, std::size_t trials, const std::string& out_dir,
                           const std::string& report_path) {
    if (trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
    std::filesystem::create_directories(out_dir);
    const long base_seed = cfg.get_long("train.seed", 1);

    std::vector<double> errors;
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < trials; ++i) {
        Config trial_cfg = cfg;
        trial_cfg.set("train.seed", std::to_string(base_seed + static_cast<long>(i)));
        std::string trial_dir = out_dir + "/trial_" + std::to_string(i);
        try {
            TrainOutputs out = run_train(trial_cfg, trial_dir);
            errors.push_back(out.final_test_error);
            seeds.push_back(static_cast<std::uint64_t>(base_seed + static_cast<long>(i)));
        } catch (const std::exception& e) {
            std::ofstream rep(report_path);
            rep << "trials = " << trials << "\n";
            rep << "failed_trial = " << i << "\n";
            rep << "failure = " << e.what() << "\n";
            throw;
        }
    }
    TrialReport report = aggregate_trials(errors);
    report.seeds = seeds;
    report.config_fingerprint = resolve_run(cfg).resolved.fingerprint();
    write_trial_report(report, report_path);
    return report;
}

void run_generate(const std::string& generator, const Config& cfg, const std::string& out_path) {
    Dataset ds;
    if (generator == "two_moons") {
        ds = two_moons(static_cast<std::size_t>(cfg.get_long("generate.n", 2506)),
                       cfg.get_double("generate.noise_sd", 0.1),
                       static_cast<std::uint64_t>(cfg.get_long("generate.seed", 1)));
    } else if (generator == "gaussian_clusters") {
        std::vector<std::vector<double>> centers;
        for (const std::string& pt : split_on(cfg.get("generate.centers", "0,0;4,4"), ';')) {
            std::vector<double> coords;
            for (const std::string& v : split_on(pt, ',')) coords.push_back(std::stod(v));
            centers.push_back(std::move(coords));
        }
        std::vector<int> classes;
        for (const std::string& v : split_on(cfg.get("generate.classes", "0;1"), ';')) {
            classes.push_back(std::stoi(v));
        }
        ds = gaussian_clusters(centers,
                               static_cast<std::size_t>(cfg.get_long("generate.per_cluster", 500)),
                               cfg.get_double("generate.sd", 0.5), classes,
                               static_cast<std::uint64_t>(cfg.get_long("generate.seed", 1)));
    } else {
        throw std::invalid_argument("generate: unknown generator " + generator);
    }
    save_csv(ds, out_path);
    std::ofstream meta(out_path + ".meta");
    if (!meta) throw std::runtime_error("generate: cannot open " + out_path + ".meta");
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(dataset_fingerprint(ds)));
    meta << "generator = " << generator << "\n";
    meta << "provenance = " << ds.provenance << "\n";
    meta << "rows = " << ds.size() << "\n";
    meta << "class_count = " << ds.class_count << "\n";
    meta << "fingerprint = " << buf << "\n";
}

} // namespace ict
