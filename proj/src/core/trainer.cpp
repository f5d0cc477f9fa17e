#include "trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eval.hpp"

namespace ict {

void IctConfig::validate() const {
    if (!(beta_alpha > 0.0)) throw std::invalid_argument("config: beta_alpha must be > 0");
    if (!(w_max >= 0.0)) throw std::invalid_argument("config: w_max must be >= 0");
    if (!(ramp_fraction > 0.0 && ramp_fraction <= 1.0)) {
        throw std::invalid_argument("config: ramp_fraction must be in (0, 1]");
    }
    if (!(ema_decay >= 0.0 && ema_decay < 1.0)) {
        throw std::invalid_argument("config: ema_decay must be in [0, 1)");
    }
    if (labeled_batch < 1 || unlabeled_batch < 1) {
        throw std::invalid_argument("config: batch sizes must be >= 1");
    }
    if (!(base_lr > 0.0)) throw std::invalid_argument("config: base_lr must be > 0");
    if (!(momentum >= 0.0 && momentum < 1.0)) {
        throw std::invalid_argument("config: momentum must be in [0, 1)");
    }
    if (!(l2 >= 0.0)) throw std::invalid_argument("config: l2 must be >= 0");
}

double sample_lambda(double beta_alpha, std::mt19937_64& rng) {
    if (!(beta_alpha > 0.0)) throw std::invalid_argument("sample_lambda: beta_alpha must be > 0");
    std::gamma_distribution<double> gamma(beta_alpha, 1.0);
    double x = gamma(rng);
    double y = gamma(rng);
    double sum = x + y;
    if (sum <= 0.0) return 0.5;  // both draws underflowed to 0
    return x / sum;
}

double ramp_w(std::uint64_t t, std::uint64_t ramp_steps, double w_max) {
    if (ramp_steps == 0) throw std::invalid_argument("ramp_w: ramp_steps must be > 0");
    if (t >= ramp_steps) return w_max;
    double frac = static_cast<double>(t) / static_cast<double>(ramp_steps);
    return w_max * std::exp(-5.0 * (1.0 - frac) * (1.0 - frac));
}

Matrix fake_labels(const Network& net, const Matrix& u) {
    if (u.rows == 0) throw std::invalid_argument("fake_labels: empty batch");
    return net.forward(u);
}

double ict_consistency_loss(const Network& student, const Network& teacher, const Matrix& u_j,
                            const Matrix& u_k, double lam) {
    Matrix u_m = mix(u_j, u_k, lam);
    Matrix y_m = mix(fake_labels(teacher, u_j), fake_labels(teacher, u_k), lam);
    return mse(student.forward(u_m), y_m);
}

StepLosses train_step(Network& student, EmaTeacher& teacher, const Matrix& x,
                      const Matrix& targets, const Matrix& u_j, const Matrix& u_k,
                      const IctConfig& config, SgdState& sgd, TrainState& state) {
    // RNG draw order is fixed so that the w_max=0 path consumes the same
    // stream as the supervised preset: lambda_sup + pairing (mixup only),
    // then the unlabeled lambda, always.
    Matrix x_sup = x;
    Matrix t_sup = targets;
    if (config.supervised_mode == SupervisedMode::Mixup) {
        double lam_sup = sample_lambda(config.beta_alpha, state.rng);
        std::vector<std::size_t> perm(x.rows);
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), state.rng);
        x_sup = mix(x, gather_rows(x, perm), lam_sup);
        t_sup = mix(targets, gather_rows(targets, perm), lam_sup);
    }
    double lam = sample_lambda(config.beta_alpha, state.rng);

    const Network& target_net =
        config.teacher_mode == TeacherMode::MeanTeacher ? teacher.params : student;
    Matrix u_m = mix(u_j, u_k, lam);
    Matrix y_m = mix(fake_labels(target_net, u_j), fake_labels(target_net, u_k), lam);

    const double w = ramp_w(state.step, state.ramp_steps, config.w_max);

    BackwardResult sup = backward(student, x_sup, t_sup, LossKind::CrossEntropy);
    if (!std::isfinite(sup.loss)) {
        throw std::runtime_error("train_step: supervised loss L_S non-finite at step " +
                                 std::to_string(state.step));
    }
    StepLosses losses;
    losses.sup = sup.loss;
    GradientSet grads = std::move(sup.grads);
    if (w > 0.0) {
        BackwardResult cons = backward(student, u_m, y_m, LossKind::Mse);
        losses.cons = cons.loss;
        grads.scale_add(cons.grads, w);
    } else {
        losses.cons = mse(student.forward(u_m), y_m);
    }
    if (!std::isfinite(losses.cons)) {
        throw std::runtime_error("train_step: consistency loss L_US non-finite at step " +
                                 std::to_string(state.step));
    }
    losses.total = losses.sup + w * losses.cons;

    state.current_w = w;
    state.current_lr = cosine_lr(sgd.step, sgd.total_steps, sgd.base_lr);

    // With few total steps a fixed decay keeps the teacher near its
    // initialization for most of training; the warmup lets it track the
    // student early and converge to the configured decay.
    if (config.ema_warmup) {
        teacher.decay = std::min(
            1.0 - 1.0 / static_cast<double>(sgd.step + 1), config.ema_decay);
    }
    if (config.ema_after_step) {
        sgd_step(student, grads, sgd);
        ema_update(teacher, student);
    } else {
        // Algorithm order: the moving average sees the pre-step student.
        ema_update(teacher, student);
        sgd_step(student, grads, sgd);
    }
    state.step = sgd.step;
    return losses;
}

TrainResult train(const IctConfig& config, const Network& initial, const Dataset& labeled,
                  const Dataset& unlabeled, const Dataset& validation,
                  const StepCallback& on_step) {
    config.validate();
    if (labeled.size() == 0) throw std::invalid_argument("train: empty labeled set");
    if (!labeled.has_labels()) throw std::invalid_argument("train: labeled set has no labels");
    if (unlabeled.size() == 0) throw std::invalid_argument("train: empty unlabeled set");

    TrainResult result;
    result.student = initial;
    result.teacher = initial;
    result.state.rng.seed(config.seed);

    BatchIterator labeled_it(labeled.size(), config.labeled_batch, config.seed ^ 0x4c41424cULL);
    BatchIterator uj_it(unlabeled.size(), config.unlabeled_batch, config.seed ^ 0x554a554aULL);
    BatchIterator uk_it(unlabeled.size(), config.unlabeled_batch, config.seed ^ 0x554b554bULL);

    const std::uint64_t steps_per_epoch = uj_it.batches_per_pass();
    result.total_steps = steps_per_epoch * config.total_epochs;
    result.state.ramp_steps = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(
               std::llround(config.ramp_fraction * static_cast<double>(result.total_steps))));

    if (config.total_epochs == 0) {
        result.best_student = result.student;
        result.best_teacher = result.teacher;
        return result;
    }

    EmaTeacher teacher{result.teacher, config.ema_decay};
    SgdState sgd = SgdState::for_network(result.student, config.momentum, config.base_lr,
                                         config.l2, result.total_steps);

    const bool eval_teacher =
        config.eval_network == EvalNetwork::Teacher && config.teacher_mode == TeacherMode::MeanTeacher;
    double last_val = -1.0;

    for (std::size_t epoch = 0; epoch < config.total_epochs; ++epoch) {
        result.state.epoch = epoch;
        for (std::uint64_t s = 0; s < steps_per_epoch; ++s) {
            auto lab_idx = labeled_it.next();
            Matrix x = gather_rows(labeled.inputs, lab_idx);
            Matrix y = one_hot(labeled.labels, lab_idx, labeled.class_count);
            auto uj_idx = uj_it.next();
            Matrix u_j = gather_rows(unlabeled.inputs, uj_idx);
            Matrix u_k;
            if (config.pair_shuffled_self) {
                std::vector<std::size_t> perm(uj_idx.size());
                for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
                std::shuffle(perm.begin(), perm.end(), result.state.rng);
                u_k = gather_rows(u_j, perm);
            } else {
                u_k = gather_rows(unlabeled.inputs, uk_it.next());
            }
            StepLosses losses =
                train_step(result.student, teacher, x, y, u_j, u_k, config, sgd, result.state);
            result.state.trace.push_back({result.state.step, result.state.current_lr,
                                          result.state.current_w, losses.sup, losses.cons,
                                          losses.total, last_val});
            if (on_step) on_step(result.state.step, result.student, teacher.params);
        }
        if (validation.size() > 0) {
            const Network& eval_net = eval_teacher ? teacher.params : result.student;
            last_val = error_rate(eval_net, validation);
            result.state.trace.back().val_error = last_val;
            if (result.best_student.layers.empty() || last_val < result.best_val_error) {
                result.best_val_error = last_val;
                result.best_val_epoch = epoch;
                result.best_student = result.student;
                result.best_teacher = teacher.params;
            }
        }
    }
    result.teacher = teacher.params;
    if (result.best_student.layers.empty()) {
        result.best_student = result.student;
        result.best_teacher = result.teacher;
    }
    return result;
}

} // namespace ict
