#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vrcq/qtable.hpp"

namespace vrcq {

/// Finite discounted MDP with a generative reward-noise scale.
///
/// Immutable once built. Valid instances come from `make_mdp` (or the
/// generators on top of it), which validates shapes and row-stochasticity.
/// Besides the dense kernel P[x][u][x'] the instance keeps, per (x,u) row, the
/// list of successors with nonzero mass and their cumulative probabilities;
/// exact operators and the sampler both walk that sparse view.
class MdpInstance {
  public:
    /// Empty placeholder (zero states); assign a built instance before use.
    MdpInstance() = default;

    std::size_t num_states() const { return states_; }
    std::size_t num_actions() const { return actions_; }
    /// D = |X|*|U|.
    std::size_t num_pairs() const { return states_ * actions_; }
    double gamma() const { return gamma_; }
    double sigma_r() const { return sigma_r_; }

    double transition(std::size_t x, std::size_t u, std::size_t next) const {
        return transitions_[(x * actions_ + u) * states_ + next];
    }
    double reward(std::size_t x, std::size_t u) const { return rewards_[x * actions_ + u]; }

    /// Row-major |X|*|U|*|X| kernel and |X|*|U| reward table.
    std::span<const double> transitions() const { return transitions_; }
    std::span<const double> rewards() const { return rewards_; }
    QTable reward_table() const { return QTable(states_, actions_, rewards_); }

    /// Successors of pair index `pair` = x*|U|+u with positive probability.
    std::span<const std::uint32_t> successors(std::size_t pair) const {
        return {succ_state_.data() + row_begin_[pair], row_begin_[pair + 1] - row_begin_[pair]};
    }
    std::span<const double> successor_probs(std::size_t pair) const {
        return {succ_prob_.data() + row_begin_[pair], row_begin_[pair + 1] - row_begin_[pair]};
    }
    std::span<const double> successor_cdf(std::size_t pair) const {
        return {succ_cdf_.data() + row_begin_[pair], row_begin_[pair + 1] - row_begin_[pair]};
    }

    /// max_{x,u} |r(x,u)|.
    double reward_max() const;

    friend bool operator==(const MdpInstance&, const MdpInstance&) = default;

  private:
    friend MdpInstance make_mdp(std::size_t, std::size_t, std::vector<double>,
                                std::vector<double>, double, double);
    void build_support();

    std::size_t states_ = 0;
    std::size_t actions_ = 0;
    std::vector<double> transitions_;
    std::vector<double> rewards_;
    double gamma_ = 0.0;
    double sigma_r_ = 0.0;

    std::vector<std::size_t> row_begin_;
    std::vector<std::uint32_t> succ_state_;
    std::vector<double> succ_prob_;
    std::vector<double> succ_cdf_;
};

/// Deterministic policy: one action index per state.
struct Policy {
    std::vector<std::size_t> action_of;
    friend bool operator==(const Policy&, const Policy&) = default;
};

/// Tolerance on row sums accepted (and renormalized) at ingestion.
inline constexpr double kRowSumIngestTol = 1e-9;
/// Rows this close to 1 are kept bit-for-bit; renormalized rows land well inside it.
inline constexpr double kRowSumExactTol = 1e-12;

/// Validate and build an instance from row-major arrays.
///
/// `transitions` has |X|*|U|*|X| entries indexed ((x*|U|+u)*|X| + x'),
/// `rewards` has |X|*|U| entries indexed (x*|U|+u). Rows whose sum is off by
/// at most 1e-9 are renormalized; anything further is rejected with the
/// offending (x,u). Throws ModelError.
MdpInstance make_mdp(std::size_t num_states, std::size_t num_actions,
                     std::vector<double> transitions, std::vector<double> rewards, double gamma,
                     double sigma_r = 0.0);

/// Random Garnet instance: each (x,u) row has `branching` distinct successors
/// drawn without replacement, with masses given by the gaps between
/// `branching-1` sorted uniform cut points. Rewards are i.i.d. U[0,1].
MdpInstance garnet(std::size_t num_states, std::size_t num_actions, std::size_t branching,
                   std::uint64_t seed, double gamma = 0.9, double sigma_r = 0.0);

/// Two-state, one-action chain: state 0 stays with probability
/// p = (4*gamma-1)/(3*gamma) and otherwise moves to the absorbing state 1.
/// Rewards are ((1-gamma)^beta, 0) and rewards are observed noise-free.
MdpInstance hard_two_state(double gamma, double beta);

/// p = (4*gamma-1)/(3*gamma) for the two-state chain.
double hard_two_state_stay_probability(double gamma);

/// Per-state argmax; ties go to the lowest action index.
Policy greedy_policy(const QTable& q);

// Exact oracles.

/// Value iteration from zero until ||Q - T(Q)||_inf <= tol*(1-gamma), which
/// certifies ||Q - Q*||_inf <= tol. Throws NumericError when the iteration
/// cap 10*log(||r||_inf / (tol*(1-gamma)^2)) / log(1/gamma) is exceeded.
QTable exact_optimal_q(const MdpInstance& mdp, double tol = 1e-10);

/// Iteration cap used by exact_optimal_q.
std::size_t value_iteration_cap(const MdpInstance& mdp, double tol);

/// Solve (I - gamma P) Q = r by LU with partial pivoting. Requires |U| = 1.
QTable policy_eval_direct(const MdpInstance& mdp);

// Instance JSON: {num_states, num_actions, gamma, sigma_r, rewards, transitions}
// with row-major flat arrays.

std::string mdp_to_json(const MdpInstance& mdp, int indent = -1);
MdpInstance mdp_from_json(const std::string& text);
void save_mdp(const MdpInstance& mdp, const std::string& path);
MdpInstance load_mdp(const std::string& path);

}  // namespace vrcq
