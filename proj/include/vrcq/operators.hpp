#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vrcq/mdp.hpp"
#include "vrcq/qtable.hpp"
#include "vrcq/rng.hpp"
#include "vrcq/sampling.hpp"

namespace vrcq {

/// Per-(x,u) variance of gamma * max_u' q(x',u') under x' ~ P(.|x,u).
struct EffectiveVariance {
    QTable values;
};

/// Instance-dependent complexity of a policy-evaluation instance (|U| = 1).
struct ComplexityMeasures {
    double v = 0.0;
    double rho = 0.0;
    double span_theta = 0.0;
};

/// Sum of a[i]*b[i]; pairwise beyond 1024 terms.
double dot(std::span<const double> a, std::span<const double> b);

/// T(q)(x,u) = r(x,u) + gamma * sum_x' P(x'|x,u) max_u' q(x',u').
QTable bellman(const MdpInstance& mdp, const QTable& q);
/// Same, writing into `out` and using `state_max` as scratch.
void bellman(const MdpInstance& mdp, const QTable& q, QTable& out,
             std::vector<double>& state_max);

/// One-sample estimate: reward_obs(x,u) + gamma * max_u' q(next_state(x,u), u').
QTable empirical_bellman(const GenerativeSample& sample, const QTable& q, const MdpInstance& mdp);
void empirical_bellman(const GenerativeSample& sample, const QTable& q, const MdpInstance& mdp,
                       QTable& out, std::vector<double>& state_max);

/// T_n(q) - T_n(anchor) + anchor_image with both empirical applications on
/// the same sample. The observed rewards cancel, so the result is
/// gamma * (max q - max anchor)(next_state) + anchor_image.
QTable recentered_bellman(const GenerativeSample& sample, const QTable& q, const QTable& anchor,
                          const QTable& anchor_image, const MdpInstance& mdp);
/// Hot-loop form: `q_max` and `anchor_max` are per-state maxima.
void recentered_bellman(const GenerativeSample& sample, std::span<const double> q_max,
                        std::span<const double> anchor_max, const QTable& anchor_image,
                        double gamma, QTable& out);

/// Average of `n_recenter` empirical Bellman applications at `anchor`, each
/// on a fresh draw from `stream`. Throws ModelError when n_recenter == 0.
QTable monte_carlo_bellman(const MdpInstance& mdp, const QTable& anchor, std::size_t n_recenter,
                           RngStream& stream);

EffectiveVariance effective_variance(const MdpInstance& mdp, const QTable& q);

/// (I - gamma P)^{-1} for a |U| = 1 instance, column by column.
std::vector<double> resolvent(const MdpInstance& mdp);

/// v, rho and span(Q*) of a |U| = 1 instance. Throws ModelError otherwise.
ComplexityMeasures complexity_measures(const MdpInstance& mdp);

/// Local lower-bound curve c * (gamma*v + rho) / sqrt(N) on the l_inf error.
double lower_bound_error(const ComplexityMeasures& m, double gamma, double total_samples,
                         double c = 1.0);

}  // namespace vrcq
