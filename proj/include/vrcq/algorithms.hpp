#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vrcq/mdp.hpp"
#include "vrcq/qtable.hpp"
#include "vrcq/rng.hpp"
#include "vrcq/schedules.hpp"

namespace vrcq {

/// Step-size rule for Q-learning style recursions.
struct StepPolicy {
    enum class Kind { Constant, RescaledLinear, Polynomial };

    Kind kind = Kind::RescaledLinear;
    double constant = 0.5;  ///< lambda for Kind::Constant, in (0,1]
    double eta = -0.5;      ///< exponent for Kind::Polynomial, < 0

    static StepPolicy constant_step(double lambda) { return {Kind::Constant, lambda, 0.0}; }
    static StepPolicy rescaled_linear() { return {Kind::RescaledLinear, 0.0, 0.0}; }
    static StepPolicy polynomial(double eta) { return {Kind::Polynomial, 0.0, eta}; }
};

/// lambda_n for iteration n >= 1: constant, 1/(1+(1-gamma)n), or n^eta
/// clamped to 1. Throws ModelError for n == 0 or an invalid policy.
double step_size(const StepPolicy& policy, std::uint64_t n, double gamma);

struct Checkpoint {
    std::uint64_t samples = 0;  ///< draws consumed so far in this run
    double error = 0.0;         ///< ||estimate - oracle||_inf at that point

    friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

struct AlgoOutput {
    QTable estimate;
    std::uint64_t samples_used = 0;
    std::vector<Checkpoint> checkpoints;
};

/// Optional error tracking shared by all runners.
struct RunOptions {
    const QTable* oracle = nullptr;      ///< Q*; checkpoints are recorded only when set
    std::uint64_t checkpoint_every = 1000;  ///< iteration cadence for non-epoch runners
    std::uint64_t inner_checkpoint_every = 0;  ///< within-epoch cadence (0: boundaries only)
};

/// Cascade Q-learning with constant step `step` for `n_iters` iterations:
///   Y_{n+1} = (1-l) Y_n + l Z_n,  Z_{n+1} = (1-l) Z_n + l T_n(Y_{n+1}),
/// returning the running average of Y_2..Y_{N+1}. Consumes exactly n_iters draws.
AlgoOutput cq_run(const MdpInstance& mdp, RngStream& stream, const QTable& theta0, double step,
                  std::uint64_t n_iters, const RunOptions& options = {});

/// Variance-reduced cascade Q-learning. Each epoch estimates T(Q_m) from
/// N_T(m) draws, runs N_e(m) cascade iterations on the recentered operator
/// from Y = Z = Q_m, and takes the inner average as Q_{m+1}.
AlgoOutput vrcq_run(const MdpInstance& mdp, RngStream& stream, const QTable& theta0,
                    const EpochSchedule& schedule, const RunOptions& options = {});

/// Synchronous Q-learning Q_{n+1} = (1-l_n) Q_n + l_n T_n(Q_n); returns the
/// average of Q_2..Q_{N+1} when `pr_average`, otherwise the last iterate.
AlgoOutput q_learning_run(const MdpInstance& mdp, RngStream& stream, const QTable& theta0,
                          const StepPolicy& step, std::uint64_t n_iters, bool pr_average,
                          const RunOptions& options = {});

/// Epoch-based variance-reduced Q-learning baseline. Same recentering as
/// vrcq_run; the inner loop is plain Q-learning on the recentered operator
/// with rescaled-linear steps restarting every epoch, and the epoch output is
/// the last iterate. The schedule's step sizes are not used.
AlgoOutput vr_q_learning_run(const MdpInstance& mdp, RngStream& stream, const QTable& theta0,
                             const EpochSchedule& schedule, const RunOptions& options = {});

/// Algorithm names accepted in configuration files.
enum class AlgorithmKind { CQ, VRCQ, VRQL, QL, QLPR };
AlgorithmKind parse_algorithm_kind(const std::string& name);
std::string to_string(AlgorithmKind kind);
bool is_epoch_based(AlgorithmKind kind);

}  // namespace vrcq
