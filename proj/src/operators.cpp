#include "vrcq/operators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "vrcq/error.hpp"

namespace vrcq {

namespace {

constexpr std::size_t kPairwiseBlock = 1024;

double pairwise_dot(const double* a, const double* b, std::size_t n) {
    if (n <= kPairwiseBlock) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_dot(a, b, half) + pairwise_dot(a + half, b + half, n - half);
}

// E_{x'~P(.|pair)} f(x') over the sparse successor list.
double row_expectation(const MdpInstance& mdp, std::size_t pair, std::span<const double> f,
                       std::vector<double>& gathered) {
    const auto succ = mdp.successors(pair);
    const auto prob = mdp.successor_probs(pair);
    if (succ.size() <= kPairwiseBlock) {
        double s = 0.0;
        for (std::size_t k = 0; k < succ.size(); ++k) s += prob[k] * f[succ[k]];
        return s;
    }
    gathered.resize(succ.size());
    for (std::size_t k = 0; k < succ.size(); ++k) gathered[k] = f[succ[k]];
    return pairwise_dot(prob.data(), gathered.data(), succ.size());
}

void require_shape(const MdpInstance& mdp, const QTable& q, const char* what) {
    if (q.num_states() != mdp.num_states() || q.num_actions() != mdp.num_actions()) {
        throw ModelError(std::string(what) + ": Q-table shape does not match the instance");
    }
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
    return pairwise_dot(a.data(), b.data(), std::min(a.size(), b.size()));
}

void bellman(const MdpInstance& mdp, const QTable& q, QTable& out,
             std::vector<double>& state_max) {
    require_shape(mdp, q, "bellman");
    q.state_max(state_max);
    if (!out.same_shape(q)) out = QTable(q.num_states(), q.num_actions());
    const auto rewards = mdp.rewards();
    const double gamma = mdp.gamma();
    std::vector<double> gathered;
    for (std::size_t p = 0; p < mdp.num_pairs(); ++p) {
        out[p] = rewards[p] + gamma * row_expectation(mdp, p, state_max, gathered);
    }
}

QTable bellman(const MdpInstance& mdp, const QTable& q) {
    QTable out;
    std::vector<double> scratch;
    bellman(mdp, q, out, scratch);
    return out;
}

void empirical_bellman(const GenerativeSample& sample, const QTable& q, const MdpInstance& mdp,
                       QTable& out, std::vector<double>& state_max) {
    require_shape(mdp, q, "empirical_bellman");
    q.state_max(state_max);
    if (!out.same_shape(q)) out = QTable(q.num_states(), q.num_actions());
    const double gamma = mdp.gamma();
    for (std::size_t p = 0; p < mdp.num_pairs(); ++p) {
        out[p] = sample.reward_obs[p] + gamma * state_max[sample.next_state[p]];
    }
}

QTable empirical_bellman(const GenerativeSample& sample, const QTable& q,
                         const MdpInstance& mdp) {
    QTable out;
    std::vector<double> scratch;
    empirical_bellman(sample, q, mdp, out, scratch);
    return out;
}

void recentered_bellman(const GenerativeSample& sample, std::span<const double> q_max,
                        std::span<const double> anchor_max, const QTable& anchor_image,
                        double gamma, QTable& out) {
    if (!out.same_shape(anchor_image)) {
        out = QTable(anchor_image.num_states(), anchor_image.num_actions());
    }
    for (std::size_t p = 0; p < anchor_image.size(); ++p) {
        const std::uint32_t y = sample.next_state[p];
        out[p] = gamma * (q_max[y] - anchor_max[y]) + anchor_image[p];
    }
}

QTable recentered_bellman(const GenerativeSample& sample, const QTable& q, const QTable& anchor,
                          const QTable& anchor_image, const MdpInstance& mdp) {
    require_shape(mdp, q, "recentered_bellman");
    require_shape(mdp, anchor, "recentered_bellman");
    require_shape(mdp, anchor_image, "recentered_bellman");
    QTable out;
    recentered_bellman(sample, q.state_max(), anchor.state_max(), anchor_image, mdp.gamma(), out);
    return out;
}

QTable monte_carlo_bellman(const MdpInstance& mdp, const QTable& anchor, std::size_t n_recenter,
                           RngStream& stream) {
    require_shape(mdp, anchor, "monte_carlo_bellman");
    if (n_recenter == 0) throw ModelError("monte_carlo_bellman: n_recenter must be >= 1");
    const auto anchor_max = anchor.state_max();
    const double gamma = mdp.gamma();
    const std::size_t pairs = mdp.num_pairs();
    // Running mean: a run of identical terms reproduces the term exactly.
    QTable out(mdp.num_states(), mdp.num_actions());
    GenerativeSample sample;
    for (std::size_t i = 0; i < n_recenter; ++i) {
        draw_sample(mdp, stream, sample);
        const double w = 1.0 / static_cast<double>(i + 1);
        for (std::size_t p = 0; p < pairs; ++p) {
            const double x = sample.reward_obs[p] + gamma * anchor_max[sample.next_state[p]];
            out[p] += (x - out[p]) * w;
        }
    }
    return out;
}

EffectiveVariance effective_variance(const MdpInstance& mdp, const QTable& q) {
    require_shape(mdp, q, "effective_variance");
    const auto vmax = q.state_max();
    const double g2 = mdp.gamma() * mdp.gamma();
    EffectiveVariance ev{QTable(mdp.num_states(), mdp.num_actions())};
    std::vector<double> dev;
    for (std::size_t p = 0; p < mdp.num_pairs(); ++p) {
        const auto succ = mdp.successors(p);
        const auto prob = mdp.successor_probs(p);
        // Deviations from the first successor's value: exact zeros when the
        // successor values coincide.
        const double ref = vmax[succ[0]];
        dev.resize(succ.size());
        for (std::size_t k = 0; k < succ.size(); ++k) dev[k] = vmax[succ[k]] - ref;
        const double mean = pairwise_dot(prob.data(), dev.data(), succ.size());
        for (std::size_t k = 0; k < succ.size(); ++k) {
            const double d = dev[k] - mean;
            dev[k] = d * d;
        }
        ev.values[p] = g2 * pairwise_dot(prob.data(), dev.data(), succ.size());
    }
    return ev;
}

std::vector<double> resolvent(const MdpInstance& mdp) {
    if (mdp.num_actions() != 1) {
        throw ModelError("resolvent: requires a policy-evaluation instance (|U| = 1)");
    }
    const auto n = static_cast<Eigen::Index>(mdp.num_states());
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index x = 0; x < n; ++x) {
        for (Eigen::Index y = 0; y < n; ++y) {
            a(x, y) -= mdp.gamma() * mdp.transition(x, 0, y);
        }
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    std::vector<double> inv(mdp.num_states() * mdp.num_states());
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        e.setZero();
        e(j) = 1.0;
        const Eigen::VectorXd col = lu.solve(e);
        for (Eigen::Index i = 0; i < n; ++i) inv[i * n + j] = col(i);
    }
    return inv;
}

ComplexityMeasures complexity_measures(const MdpInstance& mdp) {
    if (mdp.num_actions() != 1) {
        throw ModelError("complexity_measures: unsupported for |U| > 1");
    }
    const QTable theta = policy_eval_direct(mdp);
    // Variance of the one-step value under each row; rewards do not enter.
    const EffectiveVariance ev = effective_variance(mdp, theta);
    const double g2 = mdp.gamma() * mdp.gamma();
    const std::size_t n = mdp.num_states();
    std::vector<double> row_var(n);
    for (std::size_t x = 0; x < n; ++x) row_var[x] = ev.values[x] / g2;

    const auto inv = resolvent(mdp);
    double v2 = 0.0;
    double r2 = 0.0;
    std::vector<double> sq(n);
    std::vector<double> weighted(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) sq[j] = inv[i * n + j] * inv[i * n + j];
        v2 = std::max(v2, pairwise_dot(sq.data(), row_var.data(), n));
        std::fill(weighted.begin(), weighted.end(), 1.0);
        r2 = std::max(r2, pairwise_dot(sq.data(), weighted.data(), n));
    }
    ComplexityMeasures m;
    m.v = std::sqrt(v2);
    m.rho = mdp.sigma_r() == 0.0 ? 0.0 : mdp.sigma_r() * std::sqrt(r2);
    m.span_theta = span_seminorm(theta);
    return m;
}

double lower_bound_error(const ComplexityMeasures& m, double gamma, double total_samples,
                         double c) {
    return c * (gamma * m.v + m.rho) / std::sqrt(total_samples);
}

}  // namespace vrcq
