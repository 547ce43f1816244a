#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "vrcq/error.hpp"
#include "vrcq/mdp.hpp"
#include "vrcq/operators.hpp"

namespace vrcq {

std::size_t value_iteration_cap(const MdpInstance& mdp, double tol) {
    const double g = mdp.gamma();
    const double ratio = mdp.reward_max() / (tol * (1.0 - g) * (1.0 - g));
    const double contraction_steps = ratio > 1.0 ? std::log(ratio) / std::log(1.0 / g) : 1.0;
    return std::max<std::size_t>(10, static_cast<std::size_t>(std::ceil(10.0 * contraction_steps)));
}

QTable exact_optimal_q(const MdpInstance& mdp, double tol) {
    if (!(tol > 0.0)) throw ModelError("exact_optimal_q: tol must be positive");
    const double threshold = tol * (1.0 - mdp.gamma());
    const std::size_t cap = value_iteration_cap(mdp, tol);
    QTable q(mdp.num_states(), mdp.num_actions(), 0.0);
    QTable next;
    std::vector<double> scratch;
    for (std::size_t it = 0; it <= cap; ++it) {
        bellman(mdp, q, next, scratch);
        if (linf_distance(q, next) <= threshold) return q;
        std::swap(q, next);
    }
    throw NumericError("exact_optimal_q: value iteration did not reach residual " +
                       std::to_string(threshold) + " within " + std::to_string(cap) +
                       " iterations");
}

QTable policy_eval_direct(const MdpInstance& mdp) {
    if (mdp.num_actions() != 1) {
        throw ModelError("direct solve requires policy-evaluation instance (|U| = 1)");
    }
    const auto n = static_cast<Eigen::Index>(mdp.num_states());
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd r(n);
    for (Eigen::Index x = 0; x < n; ++x) {
        r(x) = mdp.reward(x, 0);
        for (Eigen::Index y = 0; y < n; ++y) a(x, y) -= mdp.gamma() * mdp.transition(x, 0, y);
    }
    const Eigen::VectorXd theta = a.partialPivLu().solve(r);
    const double residual = (a * theta - r).lpNorm<Eigen::Infinity>();
    const double rmax = r.lpNorm<Eigen::Infinity>();
    if (!(residual <= 1e-10 * rmax) && !(rmax == 0.0 && residual == 0.0)) {
        throw NumericError("policy_eval_direct: residual " + std::to_string(residual) +
                           " exceeds 1e-10 * ||r||_inf");
    }
    return QTable(mdp.num_states(), 1, std::vector<double>(theta.data(), theta.data() + n));
}

}  // namespace vrcq
