#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "data.hpp"
#include "network.hpp"
#include "optim.hpp"

namespace ict {

enum class SupervisedMode { Vanilla, Mixup };
enum class TeacherMode { MeanTeacher, Student };
enum class EvalNetwork { Teacher, Student };

struct IctConfig {
    double beta_alpha = 1.0;       // shape of Beta(alpha, alpha) for lambda
    double w_max = 1.0;            // max consistency coefficient
    double ramp_fraction = 0.25;   // fraction of total steps spent ramping w(t)
    double ema_decay = 0.999;
    bool ema_after_step = false;   // default keeps Algorithm-order: EMA sees pre-step theta
    bool ema_warmup = true;        // ramp decay as min(1 - 1/(step+1), ema_decay)
    std::size_t labeled_batch = 100;
    std::size_t unlabeled_batch = 100;
    std::size_t total_epochs = 100;
    SupervisedMode supervised_mode = SupervisedMode::Mixup;
    TeacherMode teacher_mode = TeacherMode::MeanTeacher;
    EvalNetwork eval_network = EvalNetwork::Teacher;
    bool pair_shuffled_self = false;  // pair u_j against a shuffle of itself instead of a second draw
    double base_lr = 0.1;
    double momentum = 0.9;
    double l2 = 1e-4;
    std::uint64_t seed = 1;

    void validate() const;  // throws std::invalid_argument on out-of-range fields
};

struct TraceRecord {
    std::uint64_t step = 0;
    double lr = 0.0;
    double w = 0.0;
    double loss_sup = 0.0;
    double loss_cons = 0.0;
    double loss_total = 0.0;
    double val_error = -1.0;  // percentage; -1 until the first epoch boundary
};

struct TrainState {
    std::uint64_t step = 0;
    std::size_t epoch = 0;
    std::uint64_t ramp_steps = 1;
    double current_w = 0.0;
    double current_lr = 0.0;
    std::mt19937_64 rng;
    std::vector<TraceRecord> trace;
};

/// Draw from Beta(alpha, alpha) via two Gamma(alpha, 1) variates x, y -> x/(x+y).
double sample_lambda(double beta_alpha, std::mt19937_64& rng);

/// Sigmoid ramp: w(t) = w_max * exp(-5 * (1 - min(t/ramp_steps, 1))^2).
double ramp_w(std::uint64_t t, std::uint64_t ramp_steps, double w_max);

/// Teacher (or student, under the no-teacher ablation) predictions used as
/// constant regression targets; no gradient flows through them.
Matrix fake_labels(const Network& net, const Matrix& u);

/// mse(student(mix(u_j,u_k,lam)), mix(teacher(u_j), teacher(u_k), lam)).
double ict_consistency_loss(const Network& student, const Network& teacher, const Matrix& u_j,
                            const Matrix& u_k, double lam);

struct StepLosses {
    double sup = 0.0;
    double cons = 0.0;
    double total = 0.0;
};

/// One training iteration: supervised loss on the labeled batch (optionally
/// mixup-interpolated), consistency loss on the two unlabeled batches, a
/// Nesterov step on the student and an EMA update of the teacher.
/// Throws std::runtime_error naming the offending term on non-finite loss.
StepLosses train_step(Network& student, EmaTeacher& teacher, const Matrix& x,
                      const Matrix& targets, const Matrix& u_j, const Matrix& u_k,
                      const IctConfig& config, SgdState& sgd, TrainState& state);

struct TrainResult {
    Network student;
    Network teacher;
    TrainState state;
    double best_val_error = 100.0;
    std::size_t best_val_epoch = 0;
    Network best_student;
    Network best_teacher;
    std::uint64_t total_steps = 0;
};

/// Invoked after each optimizer step; used for intermediate checkpoints.
using StepCallback =
    std::function<void(std::uint64_t step, const Network& student, const Network& teacher)>;

/// Full training loop starting from `initial` (the teacher starts as a copy).
/// Epoch = one pass over the unlabeled set; labeled batches cycle
/// independently with reshuffling. Deterministic per seed.
TrainResult train(const IctConfig& config, const Network& initial, const Dataset& labeled,
                  const Dataset& unlabeled, const Dataset& validation,
                  const StepCallback& on_step = {});

} // namespace ict
