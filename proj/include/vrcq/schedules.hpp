#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace vrcq {

/// Parameters of one outer epoch.
struct EpochParams {
    double step = 0.0;            ///< lambda(m), constant inside the epoch
    std::uint64_t epoch_len = 0;  ///< N_e(m), inner iterations
    std::uint64_t recenter = 0;   ///< N_T(m), draws spent on the recentering estimate
};

struct EpochSchedule {
    double rate = 0.0;  ///< phi, the targeted per-epoch contraction
    std::vector<EpochParams> epochs;

    std::size_t num_epochs() const { return epochs.size(); }
    /// sum_m N_e(m) + N_T(m): the draws a VRCQ run on this schedule consumes.
    std::uint64_t total_samples() const;
};

/// Multipliers on the worst-case constants. The guaranteed schedules use 1;
/// smaller values trade the guarantee for budget.
struct ScheduleScale {
    double epoch_len = 1.0;
    double recenter = 1.0;
    double step = 1.0;  ///< lambda(m) = step / sqrt(N_e(m))
};

/// Expected-error schedule over M epochs:
///   N_T(m) = ceil(32 log(2D) / (phi^(2m+2) (1-gamma)^2)),
///   N_e(m) = ceil(169 log(2D) / (phi^2 (2-phi^m)^2 (1-gamma)^2)),
///   lambda(m) = 1/sqrt(N_e(m)).
/// Gives E||Q_M - Q*|| <= phi^M (||Q*|| + sigma_r) from Q_0 = 0.
EpochSchedule schedule_expected(double phi, double gamma, std::size_t num_pairs,
                                std::size_t num_epochs, const ScheduleScale& scale = {});

/// High-probability schedule (failure probability delta). N_T(m) uses
/// log(10 M D / delta); N_e(m) is the explicit solution of
/// N >= alpha log(beta N) with alpha = 169/K, beta = 10 M D / delta and
/// K = phi^2 (2-phi^m)^2 (1-gamma)^2.
EpochSchedule schedule_high_prob(double phi, double gamma, std::size_t num_pairs,
                                 std::size_t num_epochs, double delta,
                                 const ScheduleScale& scale = {});

/// max{alpha, 2 alpha log(alpha beta)}: a sufficient N for N >= alpha log(beta N).
double log_inequality_sufficient(double alpha, double beta);

/// Two-phase worst-case schedule for an epsilon-accurate answer.
struct MinimaxSchedule {
    EpochSchedule init;   ///< brings the error to r_max / sqrt(1-gamma)
    EpochSchedule late;   ///< restarts from the init output
    double init_epochs_real = 0.0;
    double late_epochs_real = 0.0;
    double c_bar = 0.0;

    std::uint64_t total_samples() const { return init.total_samples() + late.total_samples(); }
};

/// M_init = ceil(log_{1/phi}(1/sqrt(1-gamma))),
/// M_late = ceil(log_{1/phi}(c_bar r_max / (sqrt(1-gamma) eps))) clamped at 0,
/// c_bar = 4 sqrt(2) log 2 / r_max + 1. Both phases use the high-probability
/// schedule with epoch index restarting at 0.
MinimaxSchedule schedule_minimax(double phi, double gamma, std::size_t num_pairs, double delta,
                                 double epsilon, double r_max);

/// log_{1/phi}( sqrt(1-phi^2) (1-gamma) sqrt(N) / (8 sqrt(gamma log 2D)) ).
double budgeted_epochs_real(double total_samples, double phi, double gamma,
                            std::size_t num_pairs);

/// Fixed-budget schedule for policy evaluation:
///   M = max(1, floor(budgeted_epochs_real)),
///   N_T(m) = ceil(32 gamma log(2D) / (phi^(2m+2) (1-gamma)^2)),
///   N_e(m) = N_e(0) of the expected schedule, lambda = 1/sqrt(N_e).
/// Throws ModelError when N < min_budget_constant * gamma log(D) / (1-gamma)^2
/// or when the resulting schedule does not fit in N.
EpochSchedule schedule_budgeted(double total_samples, double phi, double gamma,
                                std::size_t num_pairs, double min_budget_constant = 16.0);

/// Relaxed constants used for the two-state instance-optimality experiment:
/// M epochs at rate phi, N_T(m) = ceil(c_T / (phi^(2m) (1-gamma)^2)),
/// N_e(m) = ceil(c_e / (1-gamma)^2), lambda = 1/sqrt(N_e).
struct FixedConstantPreset {
    std::size_t num_epochs = 15;
    double phi = 0.95;
    double recenter_constant = 0.738;
    double epoch_len_constant = 5.0;
};
EpochSchedule schedule_example1(double gamma, const FixedConstantPreset& preset = {});

/// Names accepted in configuration files.
enum class ScheduleKind { Expected, HighProb, Minimax, Budgeted, Example1 };
ScheduleKind parse_schedule_kind(const std::string& name);
std::string to_string(ScheduleKind kind);

}  // namespace vrcq
